#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qmimo/common.hpp"

namespace qmimo {

/// Isotropic squared-exponential kernel
///   k(x, x') = signal_variance * exp(-|x - x'|^2 / (2 length_scale^2))
/// plus noise_variance on the diagonal of the training covariance.
struct SeKernel {
  double signal_variance = 1.0;
  double length_scale = 0.5;
  double noise_variance = 1e-6;

  double operator()(std::span<const double> x, std::span<const double> z) const;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Zero-mean GP posterior with a cached Cholesky factor of K + noise I.
class GpPosterior {
 public:
  GpPosterior(std::vector<std::vector<double>> points, std::vector<double> observations,
              SeKernel kernel);

  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& observations() const { return observations_; }
  /// Kernel actually used, after any jitter escalation.
  const SeKernel& kernel() const { return kernel_; }
  std::size_t dim() const { return points_.front().size(); }

  Prediction predict(std::span<const double> x) const;

 private:
  std::vector<std::vector<double>> points_;
  std::vector<double> observations_;
  SeKernel kernel_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd alpha_;  // (K + noise I)^{-1} y
};

/// Fits the posterior. If the factorization fails the noise variance is
/// multiplied by 10 until it exceeds 1e-2, after which NumericError is thrown.
GpPosterior gp_fit(std::vector<std::vector<double>> points, std::vector<double> observations,
                   const SeKernel& kernel);

Prediction gp_predict(const GpPosterior& posterior, std::span<const double> x);

/// mean + kappa * sqrt(variance).
double ucb(double mean, double variance, double kappa);

struct AcquisitionOptions {
  std::size_t starts = 32;
  std::size_t max_evals_per_start = 4000;
  double min_step = 1e-7;  // relative to the box width
};

/// Multi-start compass search for the UCB maximizer over a finite box. One
/// extra start is placed at the best training point when it lies in the box.
std::vector<double> maximize_acquisition(const GpPosterior& posterior, const Box& bounds,
                                         double kappa, std::uint64_t seed,
                                         const AcquisitionOptions& options = {});

struct BoTrial {
  std::vector<double> point;
  double value = 0.0;
};

/// The dataset D_{1:t} of the loop plus the incumbent.
struct BoHistory {
  std::vector<BoTrial> trials;
  std::vector<double> best_point;
  double best_value = -std::numeric_limits<double>::infinity();

  void add(std::vector<double> point, double value);
  /// Running maximum after each trial.
  std::vector<double> best_so_far() const;
};

struct BayesOptOptions {
  std::size_t rounds = 10;
  double kappa = 2.0;
  std::size_t n_init = 5;
  SeKernel kernel{};
  std::uint64_t seed = 0;
  AcquisitionOptions acquisition{};
};

/// Thrown when the objective fails; carries the trials completed so far.
class BayesOptAborted : public std::runtime_error {
 public:
  BayesOptAborted(const std::string& what, BoHistory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const BoHistory& partial() const { return partial_; }

 private:
  BoHistory partial_;
};

using Objective = std::function<double(std::span<const double>)>;

/// Maximizes `objective` over `bounds`: n_init quasi-random (shifted Halton)
/// evaluations, then `rounds` UCB-driven evaluations. The GP works in the unit
/// cube on standardized observations.
BoHistory bayes_opt(const Objective& objective, const Box& bounds, const BayesOptOptions& options);

/// Point `index` (1-based) of the Halton sequence in `dim` dimensions, shifted
/// modulo 1 by `shift`.
std::vector<double> halton_point(std::size_t index, std::span<const double> shift);

}  // namespace qmimo
