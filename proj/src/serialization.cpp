#include "qmimo/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmimo {

namespace {

void emit(std::string& out, const Json& value) {
  switch (value.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(key).dump();
        out.push_back(':');
        emit(out, item);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : value) {
        if (!first) out.push_back(',');
        first = false;
        emit(out, item);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float:
      out += format_double(value.get<double>());
      break;
    default:
      out += value.dump();
  }
}

std::vector<double> vector_of(const Json& j) { return j.get<std::vector<double>>(); }

Json json_of(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

void check_schema(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw DomainError(std::string(what) + " record lacks schema_version");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw DomainError(std::string(what) + " record has unsupported schema_version");
  }
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

std::string dump_json(const Json& value) {
  std::string out;
  emit(out, value);
  return out;
}

Json to_json(const ChannelInstance& inst) {
  Json h = Json::array();
  for (std::size_t r = 0; r < inst.n_r; ++r) {
    for (std::size_t c = 0; c < inst.n_t; ++c) h.push_back(inst.h(r, c));
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = inst.seed;
  j["n_t"] = inst.n_t;
  j["n_r"] = inst.n_r;
  j["noise_scale"] = inst.noise_scale;
  j["h"] = std::move(h);
  j["x_true"] = inst.x_true;
  j["noise"] = json_of(inst.noise);
  j["y"] = json_of(inst.y);
  return j;
}

ChannelInstance instance_from_json(const Json& j) {
  check_schema(j, "instance");
  ChannelInstance inst;
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.n_t = j.at("n_t").get<std::size_t>();
  inst.n_r = j.at("n_r").get<std::size_t>();
  inst.noise_scale = j.at("noise_scale").get<double>();
  const auto h = vector_of(j.at("h"));
  if (h.size() != inst.n_t * inst.n_r) throw DomainError("instance h has the wrong length");
  inst.h.resize(static_cast<Eigen::Index>(inst.n_r), static_cast<Eigen::Index>(inst.n_t));
  for (std::size_t r = 0; r < inst.n_r; ++r) {
    for (std::size_t c = 0; c < inst.n_t; ++c) inst.h(r, c) = h[r * inst.n_t + c];
  }
  inst.x_true = j.at("x_true").get<SpinVector>();
  const auto noise = vector_of(j.at("noise"));
  const auto y = vector_of(j.at("y"));
  inst.noise = Eigen::Map<const Eigen::VectorXd>(noise.data(), static_cast<Eigen::Index>(noise.size()));
  inst.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  validate(inst);
  return inst;
}

Json to_json(const BoHistory& history) {
  Json points = Json::array();
  Json values = Json::array();
  for (const auto& t : history.trials) {
    points.push_back(t.point);
    values.push_back(t.value);
  }
  Json j;
  j["points"] = std::move(points);
  j["values"] = std::move(values);
  j["best_so_far"] = history.best_so_far();
  j["best_point"] = history.best_point;
  j["best_value"] = history.best_value;
  return j;
}

BoHistory bo_history_from_json(const Json& j) {
  BoHistory h;
  const auto& points = j.at("points");
  const auto& values = j.at("values");
  if (points.size() != values.size()) throw DomainError("BO history points/values differ in length");
  for (std::size_t i = 0; i < points.size(); ++i) h.add(vector_of(points[i]), values[i].get<double>());
  return h;
}

Json to_json(const OptTrace& trace) {
  Json points = Json::array();
  Json values = Json::array();
  for (const auto& e : trace.evaluations) {
    points.push_back(e.point);
    values.push_back(e.value);
  }
  Json j;
  j["evaluations"] = trace.evaluations.size();
  j["best_point"] = trace.best_point;
  j["best_value"] = trace.best_value;
  j["converged"] = trace.converged;
  j["reason"] = to_string(trace.reason);
  j["points"] = std::move(points);
  j["values"] = std::move(values);
  return j;
}

Json to_json(const InitParams& init) {
  Json meta;
  meta["instance_count"] = init.meta.instance_count;
  meta["rounds"] = init.meta.rounds;
  meta["n_init"] = init.meta.n_init;
  meta["kappa"] = init.meta.kappa;
  meta["seed"] = init.meta.seed;
  meta["final_objective"] = init.meta.final_objective;
  meta["gamma_max"] = init.bounds.gamma_max;
  meta["beta_max"] = init.bounds.beta_max;

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["p"] = init.params.depth();
  j["gammas"] = init.params.gammas;
  j["betas"] = init.params.betas;
  j["training_meta"] = std::move(meta);
  j["bo_history"] = to_json(init.history);
  return j;
}

InitParams init_params_from_json(const Json& j) {
  check_schema(j, "init-params");
  InitParams init;
  init.params = QaoaParams(vector_of(j.at("gammas")), vector_of(j.at("betas")));
  if (init.params.depth() != j.at("p").get<std::size_t>()) {
    throw DomainError("init-params p does not match the number of angles");
  }
  const auto& meta = j.at("training_meta");
  init.meta.instance_count = meta.at("instance_count").get<std::size_t>();
  init.meta.rounds = meta.at("rounds").get<std::size_t>();
  init.meta.n_init = meta.at("n_init").get<std::size_t>();
  init.meta.kappa = meta.at("kappa").get<double>();
  init.meta.seed = meta.at("seed").get<std::uint64_t>();
  init.meta.final_objective = meta.at("final_objective").get<double>();
  init.bounds.gamma_max = meta.at("gamma_max").get<double>();
  init.bounds.beta_max = meta.at("beta_max").get<double>();
  if (j.contains("bo_history")) init.history = bo_history_from_json(j.at("bo_history"));
  return init;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_instances(const std::filesystem::path& path, const std::vector<ChannelInstance>& batch) {
  std::string text;
  for (const auto& inst : batch) {
    text += dump_json(to_json(inst));
    text.push_back('\n');
  }
  write_text_file(path, text);
}

std::vector<ChannelInstance> read_instances(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<ChannelInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(instance_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return out;
}

}  // namespace qmimo
