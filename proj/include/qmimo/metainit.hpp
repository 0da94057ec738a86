#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qmimo/bayesopt.hpp"
#include "qmimo/instance.hpp"
#include "qmimo/ising.hpp"
#include "qmimo/simulator.hpp"

namespace qmimo {

/// Search window for the 2p angles: gamma_l in [0, gamma_max], beta_l in [0, beta_max].
struct AngleBounds {
  double gamma_max = std::numbers::pi / 2.0;
  double beta_max = std::numbers::pi;

  /// Box over the flat [gammas..., betas...] layout.
  Box box(std::size_t depth) const;
};

/// Mean depth-p expectation over a fixed ensemble of models.
class EnsembleObjective {
 public:
  explicit EnsembleObjective(std::span<const IsingModel> models);

  std::size_t size() const { return circuits_.size(); }
  double operator()(const QaoaParams& params) const;

 private:
  std::vector<QaoaCircuit> circuits_;
};

/// F_p(gamma, beta) = (1/N) sum_i <H_i>, summed in list order.
double meta_objective(std::span<const IsingModel> models, const QaoaParams& params);

struct TrainingMeta {
  std::size_t instance_count = 0;
  std::size_t rounds = 0;
  std::size_t n_init = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  double final_objective = 0.0;  // F_p at the returned angles
};

struct InitParams {
  QaoaParams params;
  AngleBounds bounds;
  TrainingMeta meta;
  BoHistory history;  // values are -F_p
};

struct TrainOptions {
  std::size_t depth = 3;
  AngleBounds bounds{};
  BayesOptOptions bo{};
};

/// Learns shared initial angles by maximizing -F_p with Bayesian optimization.
InitParams train_init(std::span<const ChannelInstance> instances, const TrainOptions& options);

}  // namespace qmimo
