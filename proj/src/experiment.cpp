#include "qmimo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

#include "qmimo/analytic.hpp"
#include "qmimo/ising.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/simulator.hpp"

namespace qmimo {

namespace {

constexpr std::uint64_t kRandomInitStream = 0x5241'4E44'494E'4954ULL;  // "RANDINIT"
constexpr std::uint64_t kSampleStream = 0x5341'4D50'4C45'0000ULL;
constexpr std::uint64_t kSelfTestStream = 0x5345'4C46'0000'0000ULL;

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read_opt(const Json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "gen-instances") return Mode::GenInstances;
  if (name == "train-init") return Mode::TrainInit;
  if (name == "detect") return Mode::Detect;
  if (name == "compare") return Mode::Compare;
  if (name == "selftest") return Mode::SelfTest;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::GenInstances:
      return "gen-instances";
    case Mode::TrainInit:
      return "train-init";
    case Mode::Detect:
      return "detect";
    case Mode::Compare:
      return "compare";
    case Mode::SelfTest:
      return "selftest";
  }
  return "unknown";
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw ConfigError("a seed is required (config \"seed\" or --seed)");
  return *seed;
}

ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j,
                 {"schema_version", "mode", "seed", "instances", "instance_file", "init_file", "out",
                  "qaoa", "bayesopt", "localopt", "report"},
                 "config");
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
    throw ConfigError("unsupported config schema_version");
  }
  ExperimentConfig c;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("instances")) {
    const auto& s = j.at("instances");
    reject_unknown(s, {"count", "n_t", "n_r", "noise_scale"}, "instances");
    read_opt(s, "count", c.count, "instances");
    if (s.contains("n_t")) {
      if (s.at("n_t").is_array()) {
        read_opt(s, "n_t", c.n_t, "instances");
      } else {
        std::size_t single = 0;
        read_opt(s, "n_t", single, "instances");
        c.n_t = {single};
      }
    }
    read_opt(s, "n_r", c.n_r, "instances");
    read_opt(s, "noise_scale", c.noise_scale, "instances");
  }
  for (const char* key : {"instance_file", "init_file", "out"}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
    const auto p = resolve(base_dir, j.at(key).get<std::string>());
    if (std::string(key) == "instance_file") c.instance_file = p;
    if (std::string(key) == "init_file") c.init_file = p;
    if (std::string(key) == "out") c.out = p;
  }
  if (j.contains("qaoa")) {
    const auto& s = j.at("qaoa");
    reject_unknown(s, {"p", "gamma_max", "beta_max"}, "qaoa");
    read_opt(s, "p", c.depth, "qaoa");
    read_opt(s, "gamma_max", c.bounds.gamma_max, "qaoa");
    read_opt(s, "beta_max", c.bounds.beta_max, "qaoa");
  }
  if (j.contains("bayesopt")) {
    const auto& s = j.at("bayesopt");
    reject_unknown(s, {"rounds", "kappa", "n_init", "signal_variance", "length_scale", "noise_variance"},
                   "bayesopt");
    read_opt(s, "rounds", c.rounds, "bayesopt");
    read_opt(s, "kappa", c.kappa, "bayesopt");
    read_opt(s, "n_init", c.n_init, "bayesopt");
    read_opt(s, "signal_variance", c.kernel.signal_variance, "bayesopt");
    read_opt(s, "length_scale", c.kernel.length_scale, "bayesopt");
    read_opt(s, "noise_variance", c.kernel.noise_variance, "bayesopt");
  }
  if (j.contains("localopt")) {
    const auto& s = j.at("localopt");
    reject_unknown(s, {"budget", "tol", "rho_begin"}, "localopt");
    read_opt(s, "budget", c.localopt.budget, "localopt");
    read_opt(s, "tol", c.localopt.tol, "localopt");
    read_opt(s, "rho_begin", c.localopt.rho_begin, "localopt");
  }
  if (j.contains("report")) {
    const auto& s = j.at("report");
    reject_unknown(s, {"top_k", "shots", "exhaustive_cap"}, "report");
    read_opt(s, "top_k", c.top_k, "report");
    read_opt(s, "shots", c.shots, "report");
    read_opt(s, "exhaustive_cap", c.exhaustive_cap, "report");
  }

  if (c.depth == 0) throw ConfigError("qaoa.p must be at least 1");
  if (c.n_t.empty() || std::find(c.n_t.begin(), c.n_t.end(), 0U) != c.n_t.end()) {
    throw ConfigError("instances.n_t must list positive antenna counts");
  }
  if (!(c.noise_scale >= 0.0)) throw ConfigError("instances.noise_scale must be non-negative");
  if (!(c.bounds.gamma_max > 0.0) || !(c.bounds.beta_max > 0.0)) {
    throw ConfigError("qaoa.gamma_max and qaoa.beta_max must be positive");
  }
  if (c.localopt.budget == 0) throw ConfigError("localopt.budget must be at least 1");
  if (!(c.localopt.tol > 0.0) || !(c.localopt.rho_begin > 0.0)) {
    throw ConfigError("localopt.tol and localopt.rho_begin must be positive");
  }
  if (!(c.kappa >= 0.0)) throw ConfigError("bayesopt.kappa must be non-negative");
  if (!(c.kernel.noise_variance > 0.0) || !(c.kernel.length_scale > 0.0) ||
      !(c.kernel.signal_variance > 0.0)) {
    throw ConfigError("bayesopt kernel parameters must be positive");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j, path.parent_path());
}

DetectOptions detect_options(const ExperimentConfig& config) {
  DetectOptions o;
  o.depth = config.depth;
  o.bounds = config.bounds;
  o.localopt = config.localopt;
  o.top_k = config.top_k;
  o.shots = config.shots;
  o.sample_seed = config.seed.value_or(0);
  o.exhaustive_cap = config.exhaustive_cap;
  return o;
}

std::vector<double> random_init(std::uint64_t master_seed, std::size_t index, std::size_t depth,
                                const AngleBounds& bounds) {
  const Box box = bounds.box(depth);
  Rng rng = Rng::substream(derive_seed(master_seed, kRandomInitStream), index);
  std::vector<double> angles(box.dim());
  for (std::size_t i = 0; i < angles.size(); ++i) angles[i] = rng.uniform(box.lower[i], box.upper[i]);
  return angles;
}

DetectionReport detect_instance(const ChannelInstance& inst, std::size_t index,
                                std::span<const double> initial_angles, const std::string& method,
                                const DetectOptions& options) {
  if (initial_angles.size() != 2 * options.depth) {
    throw DomainError("initial angles do not match the QAOA depth");
  }
  const IsingModel model = build_ising(inst);
  const QaoaCircuit circuit(model);
  const Box box = options.bounds.box(options.depth);

  DetectionReport r;
  r.instance_index = index;
  r.instance_seed = inst.seed;
  r.n_t = inst.n_t;
  r.method = method;
  r.initial_angles.assign(initial_angles.begin(), initial_angles.end());
  r.trace = minimize(
      [&](std::span<const double> angles) { return circuit.expectation(QaoaParams::from_flat(angles)); },
      initial_angles, box, options.localopt);
  r.final_angles = r.trace.best_point;

  const Statevector state = circuit.state(QaoaParams::from_flat(r.final_angles));
  const auto probs = state.probabilities();
  std::vector<std::uint64_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return probs[a] > probs[b]; });
  const std::size_t k = std::min<std::size_t>(options.top_k, order.size());
  for (std::size_t i = 0; i < k; ++i) {
    r.top_states.push_back({bitstring_of_index(order[i], inst.n_t), probs[order[i]]});
  }
  r.argmax_bits = bitstring_of_index(order.front(), inst.n_t);
  r.decoded = decode_state(r.argmax_bits);

  const Detection reference = brute_force_detect(inst, options.exhaustive_cap);
  r.brute_force_x = reference.x_best;
  r.brute_force_value = reference.value;
  r.solution_bits = encode_state(reference.x_best);
  r.x_true_bits = encode_state(inst.x_true);
  r.success = r.decoded == reference.x_best;
  r.success_probability = success_probability(state, reference.x_best);
  if (options.shots > 0) {
    r.sampled = sample(state, options.shots,
                       derive_seed(derive_seed(options.sample_seed, kSampleStream), index));
  }
  return r;
}

Json to_json(const DetectionReport& r) {
  Json table = Json::array();
  for (const auto& e : r.top_states) table.push_back(Json{{"bits", e.bits}, {"probability", e.probability}});
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = "ok";
  j["instance_index"] = r.instance_index;
  j["instance_seed"] = r.instance_seed;
  j["n_t"] = r.n_t;
  j["method"] = r.method;
  j["initial_angles"] = r.initial_angles;
  j["final_angles"] = r.final_angles;
  j["final_cost"] = r.trace.best_value;
  j["top_states"] = std::move(table);
  j["argmax_bits"] = r.argmax_bits;
  j["decoded"] = r.decoded;
  j["brute_force_x"] = r.brute_force_x;
  j["brute_force_value"] = r.brute_force_value;
  j["solution_bits"] = r.solution_bits;
  j["x_true_bits"] = r.x_true_bits;
  j["success"] = r.success;
  j["success_probability"] = r.success_probability;
  if (!r.sampled.empty()) {
    Json counts = Json::object();
    for (const auto& [bits, n] : r.sampled) counts[bits] = n;
    j["sampled_counts"] = std::move(counts);
  }
  j["trace"] = to_json(r.trace);
  return j;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

MethodStats stats_of(const std::vector<DetectionReport>& reports) {
  MethodStats s;
  s.runs = reports.size();
  if (reports.empty()) return s;
  std::vector<double> finals;
  double prob = 0.0;
  double successes = 0.0;
  for (const auto& r : reports) {
    finals.push_back(r.trace.best_value);
    prob += r.success_probability;
    successes += r.success ? 1.0 : 0.0;
  }
  s.median_final_cost = median(finals);
  s.mean_success_probability = prob / static_cast<double>(reports.size());
  s.success_rate = successes / static_cast<double>(reports.size());
  return s;
}

Json stats_json(const MethodStats& s) {
  return Json{{"runs", s.runs},
              {"median_final_cost", s.median_final_cost},
              {"mean_success_probability", s.mean_success_probability},
              {"success_rate", s.success_rate}};
}

}  // namespace

ComparisonResult compare_methods(const std::vector<ChannelInstance>& instances,
                                 const QaoaParams& trained, std::uint64_t master_seed,
                                 const DetectOptions& options) {
  if (trained.depth() != options.depth) {
    throw DomainError("trained initialization depth does not match the configured depth");
  }
  ComparisonResult out;
  const auto trained_angles = trained.flat();
  std::size_t better = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    try {
      auto a = detect_instance(instances[i], i, trained_angles, kTrainedInit, options);
      auto b = detect_instance(instances[i], i,
                               random_init(master_seed, i, options.depth, options.bounds),
                               kRandomInit, options);
      if (a.trace.best_value < b.trace.best_value) ++better;
      out.trained.push_back(std::move(a));
      out.random.push_back(std::move(b));
    } catch (const std::exception& e) {
      out.failures.push_back("instance " + std::to_string(i) + ": " + e.what());
    }
  }
  out.trained_stats = stats_of(out.trained);
  out.random_stats = stats_of(out.random);
  out.fraction_trained_better =
      out.trained.empty() ? 0.0 : static_cast<double>(better) / static_cast<double>(out.trained.size());
  return out;
}

Json summary_json(const ComparisonResult& result) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["paired_instances"] = result.trained.size();
  j["failures"] = result.failures;
  j["fraction_trained_better"] = result.fraction_trained_better;
  j[kTrainedInit] = stats_json(result.trained_stats);
  j[kRandomInit] = stats_json(result.random_stats);
  return j;
}

std::string curves_csv(const ComparisonResult& result) {
  std::string out = "iteration,cost,method,instance\n";
  auto emit = [&](const std::vector<DetectionReport>& reports) {
    for (const auto& r : reports) {
      for (std::size_t it = 0; it < r.trace.evaluations.size(); ++it) {
        out += std::to_string(it + 1) + ',' + format_double(r.trace.evaluations[it].value) + ',' +
               r.method + ',' + std::to_string(r.instance_index) + '\n';
      }
    }
  };
  emit(result.trained);
  emit(result.random);
  return out;
}

namespace {

void require_path(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is required for this mode");
}

void require_existing(const std::filesystem::path& p, const char* what) {
  require_path(p, what);
  if (!std::filesystem::exists(p)) throw ConfigError(std::string(what) + " '" + p.string() + "' does not exist");
}

QaoaParams load_trained(const ExperimentConfig& config) {
  const InitParams init = init_params_from_json(read_json_file(config.init_file));
  if (init.params.depth() != config.depth) {
    throw ConfigError("init file has p = " + std::to_string(init.params.depth()) +
                      " but the config uses p = " + std::to_string(config.depth));
  }
  return init.params;
}

int run_gen_instances(const ExperimentConfig& config) {
  require_path(config.out, "out");
  const auto batch = generate_batch(config.count, config.n_t, config.n_r, config.noise_scale,
                                    config.require_seed());
  write_instances(config.out, batch);
  std::cerr << "wrote " << batch.size() << " instances to " << config.out.string() << '\n';
  return 0;
}

int run_train_init(const ExperimentConfig& config) {
  require_existing(config.instance_file, "instance_file");
  require_path(config.out, "out");
  if (config.rounds == 0) throw ConfigError("bayesopt.rounds must be at least 1");
  if (config.n_init == 0) throw ConfigError("bayesopt.n_init must be at least 1");
  const auto instances = read_instances(config.instance_file);
  TrainOptions opts;
  opts.depth = config.depth;
  opts.bounds = config.bounds;
  opts.bo.rounds = config.rounds;
  opts.bo.kappa = config.kappa;
  opts.bo.n_init = config.n_init;
  opts.bo.kernel = config.kernel;
  opts.bo.seed = config.require_seed();
  const InitParams init = train_init(instances, opts);
  write_text_file(config.out, dump_json(to_json(init)) + "\n");
  std::cerr << "trained " << 2 * init.params.depth() << " angles on " << instances.size()
            << " instances, F_p = " << init.meta.final_objective << '\n';
  return 0;
}

int run_detect(const ExperimentConfig& config) {
  require_existing(config.instance_file, "instance_file");
  require_path(config.out, "out");
  const std::uint64_t seed = config.require_seed();
  const auto instances = read_instances(config.instance_file);
  std::optional<QaoaParams> trained;
  if (!config.init_file.empty()) {
    require_existing(config.init_file, "init_file");
    trained = load_trained(config);
  }
  const DetectOptions options = detect_options(config);
  std::string text;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    try {
      const auto report =
          trained ? detect_instance(instances[i], i, trained->flat(), kTrainedInit, options)
                  : detect_instance(instances[i], i,
                                    random_init(seed, i, config.depth, config.bounds), kRandomInit,
                                    options);
      text += dump_json(to_json(report)) + "\n";
    } catch (const std::exception& e) {
      ++failed;
      Json j{{"schema_version", kSchemaVersion},
             {"status", "failed"},
             {"instance_index", i},
             {"instance_seed", instances[i].seed},
             {"error", e.what()}};
      text += dump_json(j) + "\n";
    }
  }
  write_text_file(config.out, text);
  std::cerr << "detected " << instances.size() - failed << "/" << instances.size() << " instances\n";
  return failed == 0 ? 0 : 3;
}

int run_compare(const ExperimentConfig& config) {
  require_existing(config.instance_file, "instance_file");
  require_existing(config.init_file, "init_file");
  require_path(config.out, "out");
  const std::uint64_t seed = config.require_seed();
  const auto instances = read_instances(config.instance_file);
  const auto result = compare_methods(instances, load_trained(config), seed, detect_options(config));

  std::string reports;
  for (std::size_t i = 0; i < result.trained.size(); ++i) {
    reports += dump_json(to_json(result.trained[i])) + "\n";
    reports += dump_json(to_json(result.random[i])) + "\n";
  }
  write_text_file(config.out / "reports.jsonl", reports);
  write_text_file(config.out / "curves.csv", curves_csv(result));
  write_text_file(config.out / "summary.json", dump_json(summary_json(result)) + "\n");
  std::cerr << "compared " << result.trained.size() << " instances; trained-init better on "
            << result.fraction_trained_better * 100.0 << "%\n";
  return result.failures.empty() ? 0 : 3;
}

int run_selftest(const ExperimentConfig& config) {
  const std::uint64_t seed = config.require_seed();
  Rng rng = Rng::substream(seed, kSelfTestStream);

  double analytic_err = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(5);
    const auto inst = generate_instance(n, n, 1.0, rng.next_u64());
    const auto model = build_ising(inst);
    const double gamma = rng.uniform(0.0, config.bounds.gamma_max);
    const double beta = rng.uniform(0.0, config.bounds.beta_max);
    const double sim = expectation(model, QaoaParams({gamma}, {beta}));
    analytic_err = std::max(analytic_err, std::abs(c1_expectation(model, gamma, beta) - sim));
  }

  double offset_err = 0.0;
  std::size_t ground_agree = 0;
  constexpr std::size_t kGroundInstances = 50;
  for (std::size_t t = 0; t < kGroundInstances; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const auto inst = generate_instance(n, n, 1.0, rng.next_u64());
    const auto model = build_ising(inst);
    const auto diag = hc_diagonal(model);
    for (std::uint64_t m = 0; m < diag.size(); ++m) {
      const auto x = spins_from_index(m, n);
      offset_err = std::max(offset_err, std::abs(diag[m] + model.offset - ml_objective(inst, x)));
    }
    const auto argmin = static_cast<std::uint64_t>(std::min_element(diag.begin(), diag.end()) - diag.begin());
    if (decode_state(bitstring_of_index(argmin, n)) == brute_force_detect(inst).x_best) ++ground_agree;
  }

  const bool ok = analytic_err <= 1e-9 && offset_err <= 1e-9 && ground_agree == kGroundInstances;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["analytic_max_abs_error"] = analytic_err;
  j["offset_identity_max_abs_error"] = offset_err;
  j["ground_state_agreement"] = ground_agree;
  j["ground_state_instances"] = kGroundInstances;
  j["passed"] = ok;
  const std::string text = dump_json(j) + "\n";
  if (config.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(config.out, text);
  }
  if (!ok) throw NumericError("selftest failed");
  return 0;
}

}  // namespace

int run_mode(Mode mode, const ExperimentConfig& config) {
  switch (mode) {
    case Mode::GenInstances:
      return run_gen_instances(config);
    case Mode::TrainInit:
      return run_train_init(config);
    case Mode::Detect:
      return run_detect(config);
    case Mode::Compare:
      return run_compare(config);
    case Mode::SelfTest:
      return run_selftest(config);
  }
  return 2;
}

}  // namespace qmimo
