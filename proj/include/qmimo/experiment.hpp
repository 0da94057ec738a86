#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmimo/instance.hpp"
#include "qmimo/localopt.hpp"
#include "qmimo/metainit.hpp"
#include "qmimo/serialization.hpp"

namespace qmimo {

/// Invalid or incomplete configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { GenInstances, TrainInit, Detect, Compare, SelfTest };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;

  // Instance generation.
  std::size_t count = 100;
  std::vector<std::size_t> n_t{2, 3};
  std::size_t n_r = 0;  // 0: same as n_t
  double noise_scale = 1.0;

  std::filesystem::path instance_file;
  std::filesystem::path init_file;
  std::filesystem::path out;

  std::size_t depth = 3;
  AngleBounds bounds{};
  std::size_t rounds = 10;
  double kappa = 2.0;
  std::size_t n_init = 5;
  SeKernel kernel{};

  MinimizeOptions localopt{};

  std::size_t top_k = 8;
  std::size_t shots = 0;
  std::size_t exhaustive_cap = kDefaultExhaustiveCap;

  std::uint64_t require_seed() const;
};

/// Parses a JSON config. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ProbabilityEntry {
  std::string bits;
  double probability = 0.0;
};

inline constexpr const char* kTrainedInit = "trained-init";
inline constexpr const char* kRandomInit = "random-init";

struct DetectionReport {
  std::size_t instance_index = 0;
  std::uint64_t instance_seed = 0;
  std::size_t n_t = 0;
  std::string method;
  std::vector<double> initial_angles;
  OptTrace trace;
  std::vector<double> final_angles;
  std::vector<ProbabilityEntry> top_states;  // descending probability
  std::string argmax_bits;
  SpinVector decoded;
  SpinVector brute_force_x;
  double brute_force_value = 0.0;
  std::string solution_bits;  // bitstring of the brute-force solution
  std::string x_true_bits;
  bool success = false;
  double success_probability = 0.0;
  std::map<std::string, std::size_t> sampled;  // only when shots > 0
};

struct DetectOptions {
  std::size_t depth = 3;
  AngleBounds bounds{};
  MinimizeOptions localopt{};
  std::size_t top_k = 8;
  std::size_t shots = 0;
  std::uint64_t sample_seed = 0;
  std::size_t exhaustive_cap = kDefaultExhaustiveCap;
};

DetectOptions detect_options(const ExperimentConfig& config);

/// Refines the angles with the local optimizer starting from `initial_angles`
/// and reads out the final state.
DetectionReport detect_instance(const ChannelInstance& inst, std::size_t index,
                                std::span<const double> initial_angles, const std::string& method,
                                const DetectOptions& options);

/// Uniform random starting angles for instance `index`, one draw per instance
/// from a stream derived from `master_seed`.
std::vector<double> random_init(std::uint64_t master_seed, std::size_t index, std::size_t depth,
                                const AngleBounds& bounds);

Json to_json(const DetectionReport& report);

struct MethodStats {
  std::size_t runs = 0;
  double median_final_cost = 0.0;
  double mean_success_probability = 0.0;
  double success_rate = 0.0;
};

struct ComparisonResult {
  std::vector<DetectionReport> trained;
  std::vector<DetectionReport> random;
  std::vector<std::string> failures;
  MethodStats trained_stats;
  MethodStats random_stats;
  double fraction_trained_better = 0.0;  // strictly lower final cost
};

/// Paired trained-init / random-init runs with identical budgets.
ComparisonResult compare_methods(const std::vector<ChannelInstance>& instances,
                                 const QaoaParams& trained, std::uint64_t master_seed,
                                 const DetectOptions& options);

Json summary_json(const ComparisonResult& result);
/// Per-evaluation cost curves: iteration,cost,method,instance.
std::string curves_csv(const ComparisonResult& result);

/// Outcome of a mode run: 0 ok, 3 partial failure.
int run_mode(Mode mode, const ExperimentConfig& config);

}  // namespace qmimo
