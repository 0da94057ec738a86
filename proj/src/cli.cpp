#include "qmimo/cli.hpp"

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qmimo/experiment.hpp"

namespace qmimo {

int run_cli(int argc, char** argv) {
  CLI::App app{"QAOA-based maximum-likelihood MIMO detection"};
  std::string mode_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  app.add_option("mode", mode_name, "gen-instances | train-init | detect | compare | selftest")
      ->required()
      ->check(CLI::IsMember({"gen-instances", "train-init", "detect", "compare", "selftest"}));
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out, "output path (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const Mode mode = parse_mode(mode_name);
    ExperimentConfig config = load_config(config_path);
    const Json raw = read_json_file(config_path);
    if (raw.contains("mode") && raw.at("mode") != mode_name) {
      throw ConfigError("config is for mode '" + raw.at("mode").get<std::string>() +
                        "' but '" + mode_name + "' was requested");
    }
    if (seed) config.seed = seed;
    if (!out.empty()) config.out = out;
    return run_mode(mode, config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qmimo
