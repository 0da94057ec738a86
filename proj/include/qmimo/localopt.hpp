#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmimo/common.hpp"

namespace qmimo {

struct Evaluation {
  std::vector<double> point;
  double value = 0.0;
};

enum class StopReason { ToleranceReached, BudgetExhausted, DegenerateSimplex };

std::string to_string(StopReason reason);

struct OptTrace {
  std::vector<Evaluation> evaluations;
  std::vector<double> best_point;
  double best_value = std::numeric_limits<double>::infinity();
  bool converged = false;
  StopReason reason = StopReason::BudgetExhausted;

  /// Running minimum over evaluations, in evaluation order.
  std::vector<double> running_best() const;
};

struct MinimizeOptions {
  std::size_t budget = 150;
  double tol = 1e-6;         // final trust-region radius
  double rho_begin = 0.5;    // capped at half the narrowest finite box width
};

class MinimizeAborted : public std::runtime_error {
 public:
  MinimizeAborted(const std::string& what, OptTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const OptTrace& partial() const { return partial_; }

 private:
  OptTrace partial_;
};

/// Derivative-free minimization by linear approximation on a simplex of n+1
/// points with a shrinking trust region (Powell's COBYLA scheme without
/// general constraints). Box bounds are enforced exactly in the trust-region
/// step, so the objective is only ever called at points inside `bounds`; x0 is
/// clamped into the box first.
OptTrace minimize(const std::function<double(std::span<const double>)>& objective,
                  std::span<const double> x0, const Box& bounds,
                  const MinimizeOptions& options = {});

/// argmin g.d subject to |d| <= radius and lower <= d <= upper (componentwise,
/// with lower <= 0 <= upper). Solution has the form clip(-t g) for t >= 0.
std::vector<double> box_trust_step(std::span<const double> gradient,
                                   std::span<const double> lower,
                                   std::span<const double> upper, double radius);

}  // namespace qmimo
