#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "qmimo/cli.hpp"
#include "qmimo/experiment.hpp"

using namespace qmimo;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir() {
  std::string tmpl = (fs::temp_directory_path() / "qmimo_test_XXXXXX").string();
  REQUIRE(mkdtemp(tmpl.data()) != nullptr);
  return tmpl;
}

struct TempDir {
  fs::path path = make_temp_dir();
  ~TempDir() { fs::remove_all(path); }
};

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qaoa-mimo");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path write_config(const fs::path& dir, const std::string& name, const Json& j) {
  const auto p = dir / name;
  write_text_file(p, dump_json(j));
  return p;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(parse_mode("gen-instances") == Mode::GenInstances);
  CHECK(parse_mode("train-init") == Mode::TrainInit);
  CHECK(parse_mode("detect") == Mode::Detect);
  CHECK(parse_mode("compare") == Mode::Compare);
  CHECK(parse_mode("selftest") == Mode::SelfTest);
  CHECK(to_string(Mode::TrainInit) == "train-init");
  CHECK_THROWS_AS(parse_mode("bogus"), ConfigError);
}

TEST_CASE("config parsing") {
  const Json j = Json::parse(R"({
    "seed": 42,
    "instances": {"count": 7, "n_t": [4], "noise_scale": 0.5},
    "instance_file": "data/inst.jsonl",
    "out": "/abs/out.json",
    "qaoa": {"p": 2, "gamma_max": 1.0},
    "bayesopt": {"rounds": 3, "kappa": 1.5, "length_scale": 0.3},
    "localopt": {"budget": 40, "tol": 1e-4},
    "report": {"top_k": 4}
  })");
  const auto c = parse_config(j, "/base");
  CHECK(c.require_seed() == 42);
  CHECK(c.count == 7);
  CHECK(c.n_t == std::vector<std::size_t>{4});
  CHECK(c.noise_scale == 0.5);
  CHECK(c.instance_file == fs::path("/base/data/inst.jsonl"));
  CHECK(c.out == fs::path("/abs/out.json"));
  CHECK(c.depth == 2);
  CHECK(c.bounds.gamma_max == 1.0);
  CHECK(c.rounds == 3);
  CHECK(c.kappa == 1.5);
  CHECK(c.kernel.length_scale == 0.3);
  CHECK(c.localopt.budget == 40);
  CHECK(c.top_k == 4);
  CHECK(parse_config(Json::parse(R"({"instances": {"n_t": 5}})"), ".").n_t ==
        std::vector<std::size_t>{5});

  CHECK_THROWS_AS(parse_config(Json::parse(R"({"sed": 1})"), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"qaoa": {"p": 0}})"), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"seed": "x"})"), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"schema_version": 99})"), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse("[1]"), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse("{}"), ".").require_seed(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("gen-instances writes a reproducible batch") {
  TempDir tmp;
  ExperimentConfig c;
  c.seed = 7;
  c.out = tmp.path / "a.jsonl";
  CHECK(run_mode(Mode::GenInstances, c) == 0);
  const auto batch = read_instances(c.out);
  REQUIRE(batch.size() == 100);
  for (const auto& inst : batch) CHECK((inst.n_t == 2 || inst.n_t == 3));

  const auto first = read_text_file(c.out);
  c.out = tmp.path / "b.jsonl";
  run_mode(Mode::GenInstances, c);
  CHECK(read_text_file(c.out) == first);

  c.count = 1;
  c.out = tmp.path / "one.jsonl";
  run_mode(Mode::GenInstances, c);
  const auto one = read_instances(c.out);
  REQUIRE(one.size() == 1);
  write_instances(tmp.path / "again.jsonl", one);
  CHECK(read_text_file(tmp.path / "again.jsonl") == read_text_file(c.out));
  const auto& inst = one[0];
  const auto regenerated = generate_instance(inst.n_t, inst.n_r, inst.noise_scale, inst.seed);
  CHECK(regenerated.h == inst.h);
  CHECK(regenerated.y == inst.y);
}

TEST_CASE("train-init contract") {
  TempDir tmp;
  ExperimentConfig c;
  c.seed = 3;
  c.out = tmp.path / "inst.jsonl";
  run_mode(Mode::GenInstances, c);
  c.instance_file = c.out;
  c.out = tmp.path / "init.json";
  CHECK(run_mode(Mode::TrainInit, c) == 0);
  const auto init = init_params_from_json(read_json_file(c.out));
  CHECK(init.params.flat().size() == 6);
  CHECK(init.meta.instance_count == 100);
  CHECK(init.meta.rounds == 10);
  CHECK(init.history.trials.size() == 15);
  const auto text = read_text_file(c.out);
  run_mode(Mode::TrainInit, c);
  CHECK(read_text_file(c.out) == text);

  c.rounds = 0;
  CHECK_THROWS_AS(run_mode(Mode::TrainInit, c), ConfigError);
  c.rounds = 10;
  c.instance_file = tmp.path / "missing.jsonl";
  CHECK_THROWS_AS(run_mode(Mode::TrainInit, c), ConfigError);
}

TEST_CASE("detect on an easy noise-free instance") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(6, 6);
  const SpinVector x{-1, -1, -1, -1, 1, 1};
  const auto inst = make_instance(h, x,
                                  Eigen::VectorXd::Zero(6), 123);
  DetectOptions o;
  o.localopt.budget = 300;
  for (int which = 0; which < 2; ++which) {
    const auto angles = which == 0 ? random_init(9, 0, o.depth, o.bounds)
                                   : std::vector<double>{0.2, 0.4, 0.6, 0.6, 0.4, 0.2};
    const auto r = detect_instance(inst, 0, angles, which == 0 ? kRandomInit : kTrainedInit, o);
    CHECK(r.decoded == x);
    CHECK(r.success);
    CHECK(r.solution_bits == "111100");
    CHECK(r.x_true_bits == "111100");
    CHECK(r.argmax_bits == "111100");
    const auto bf = brute_force_detect(inst);
    CHECK(r.brute_force_x == bf.x_best);
    CHECK(r.brute_force_value == bf.value);
    CHECK(r.top_states.size() == o.top_k);
    for (std::size_t i = 1; i < r.top_states.size(); ++i) {
      CHECK(r.top_states[i - 1].probability >= r.top_states[i].probability);
    }
    CHECK(r.trace.evaluations.size() <= o.localopt.budget);
    CHECK(r.final_angles == r.trace.best_point);
    CHECK(o.bounds.box(o.depth).contains(r.final_angles));
  }
}

TEST_CASE("random_init is per-instance deterministic and inside bounds") {
  const AngleBounds b;
  const auto a = random_init(5, 3, 3, b);
  CHECK(a == random_init(5, 3, 3, b));
  CHECK(a != random_init(5, 4, 3, b));
  CHECK(a.size() == 6);
  CHECK(b.box(3).contains(a));
}

TEST_CASE("compare pairs every instance") {
  const std::vector<std::size_t> six{6};
  const auto instances = generate_batch(20, six, 0, 1.0, 31);
  DetectOptions o;
  o.localopt.budget = 30;
  const QaoaParams trained({0.1, 0.2, 0.3}, {0.3, 0.2, 0.1});
  const auto r = compare_methods(instances, trained, 77, o);
  CHECK(r.trained.size() + r.random.size() == 40);
  CHECK(r.failures.empty());
  CHECK(r.fraction_trained_better >= 0.0);
  CHECK(r.fraction_trained_better <= 1.0);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(r.trained[i].method == kTrainedInit);
    CHECK(r.random[i].method == kRandomInit);
    CHECK(r.trained[i].initial_angles == trained.flat());
    CHECK(r.trained[i].instance_seed == r.random[i].instance_seed);
  }
  const auto csv = curves_csv(r);
  CHECK(csv.rfind("iteration,cost,method,instance\n", 0) == 0);
  std::size_t evals = 0;
  for (const auto& rep : r.trained) evals += rep.trace.evaluations.size();
  for (const auto& rep : r.random) evals += rep.trace.evaluations.size();
  CHECK(count_lines(csv) == evals + 1);
  const auto s = summary_json(r);
  CHECK(s.contains("fraction_trained_better"));
}

TEST_CASE("cli exit codes and modes end to end") {
  TempDir tmp;
  const auto dir = tmp.path;
  Json base{{"seed", 11},
            {"instances", {{"count", 4}, {"n_t", Json::array({3})}}},
            {"instance_file", "inst.jsonl"},
            {"init_file", "init.json"},
            {"bayesopt", {{"rounds", 2}}},
            {"localopt", {{"budget", 20}}}};

  auto cfg = base;
  cfg["out"] = "inst.jsonl";
  CHECK(cli({"gen-instances", "--config", write_config(dir, "g.json", cfg).string()}) == 0);
  cfg["out"] = "init.json";
  CHECK(cli({"train-init", "--config", write_config(dir, "t.json", cfg).string()}) == 0);
  cfg["out"] = "det.jsonl";
  CHECK(cli({"detect", "--config", write_config(dir, "d.json", cfg).string()}) == 0);
  CHECK(count_lines(read_text_file(dir / "det.jsonl")) == 4);
  cfg["out"] = "cmp";
  CHECK(cli({"compare", "--config", write_config(dir, "c.json", cfg).string()}) == 0);
  CHECK(fs::exists(dir / "cmp" / "summary.json"));
  CHECK(count_lines(read_text_file(dir / "cmp" / "reports.jsonl")) == 8);
  CHECK(cli({"selftest", "--config", write_config(dir, "s.json", cfg).string(), "--out",
             (dir / "self.json").string()}) == 0);
  CHECK(read_json_file(dir / "self.json")["passed"] == true);

  CHECK(cli({"detect"}) == 1);
  CHECK(cli({"nonsense", "--config", "x.json"}) == 1);
  CHECK(cli({"detect", "--config", (dir / "absent.json").string()}) == 1);
  auto bad = base;
  bad["unknown_key"] = 1;
  CHECK(cli({"detect", "--config", write_config(dir, "bad.json", bad).string()}) == 1);
  auto mismatch = base;
  mismatch["mode"] = "compare";
  CHECK(cli({"detect", "--config", write_config(dir, "mm.json", mismatch).string()}) == 1);
  auto wrong_p = base;
  wrong_p["qaoa"] = {{"p", 2}};
  wrong_p["out"] = "det2.jsonl";
  CHECK(cli({"detect", "--config", write_config(dir, "wp.json", wrong_p).string()}) == 1);

  // An instance too large for the qubit cap fails at run time.
  auto big = base;
  big["instances"] = {{"count", 1}, {"n_t", Json::array({3})}};
  big["out"] = "big.jsonl";
  big["report"] = {{"exhaustive_cap", 2}};
  cli({"gen-instances", "--config", write_config(dir, "bg.json", big).string()});
  big["instance_file"] = "big.jsonl";
  big["init_file"] = "";
  big["out"] = "bigdet.jsonl";
  CHECK(cli({"detect", "--config", write_config(dir, "bd.json", big).string()}) == 3);
  CHECK(read_text_file(dir / "bigdet.jsonl").find("\"failed\"") != std::string::npos);

  cfg["seed"] = nullptr;
  cfg.erase("seed");
  cfg["out"] = "noseed.jsonl";
  CHECK(cli({"gen-instances", "--config", write_config(dir, "ns.json", cfg).string()}) == 1);
  CHECK(cli({"gen-instances", "--config", (dir / "ns.json").string(), "--seed", "5"}) == 0);
}
