#include "qmimo/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmimo/rng.hpp"

namespace qmimo {

double SeKernel::operator()(std::span<const double> x, std::span<const double> z) const {
  double dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - z[i];
    dist2 += d * d;
  }
  return signal_variance * std::exp(-dist2 / (2.0 * length_scale * length_scale));
}

GpPosterior::GpPosterior(std::vector<std::vector<double>> points,
                         std::vector<double> observations, SeKernel kernel)
    : points_(std::move(points)), observations_(std::move(observations)), kernel_(kernel) {
  if (points_.empty()) throw DomainError("GP needs at least one training point");
  if (points_.size() != observations_.size()) {
    throw DomainError("GP points and observations differ in length");
  }
  const std::size_t d = points_.front().size();
  for (const auto& p : points_) {
    if (p.size() != d) throw DomainError("GP training points differ in dimension");
  }
  if (!(kernel_.noise_variance > 0.0)) throw DomainError("GP noise variance must be positive");
  if (!(kernel_.length_scale > 0.0) || !(kernel_.signal_variance > 0.0)) {
    throw DomainError("GP kernel scales must be positive");
  }

  const auto n = static_cast<Eigen::Index>(points_.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = kernel_(points_[i], points_[j]);
    }
  }
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(observations_.data(), n);

  for (;;) {
    Eigen::MatrixXd noisy = k;
    noisy.diagonal().array() += kernel_.noise_variance;
    factor_.compute(noisy);
    if (factor_.info() == Eigen::Success &&
        (factor_.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
      break;
    }
    kernel_.noise_variance *= 10.0;
    if (kernel_.noise_variance > 1e-2) {
      throw NumericError("GP kernel matrix is not positive definite even with jitter 1e-2");
    }
  }
  alpha_ = factor_.solve(y);
}

Prediction GpPosterior::predict(std::span<const double> x) const {
  if (x.size() != dim()) throw DomainError("GP query dimension mismatch");
  const auto n = static_cast<Eigen::Index>(points_.size());
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) kstar(i) = kernel_(points_[i], x);
  Prediction out;
  out.mean = kstar.dot(alpha_);
  const Eigen::VectorXd v = factor_.matrixL().solve(kstar);
  out.variance = std::max(0.0, kernel_.signal_variance - v.squaredNorm());
  return out;
}

GpPosterior gp_fit(std::vector<std::vector<double>> points, std::vector<double> observations,
                   const SeKernel& kernel) {
  return GpPosterior(std::move(points), std::move(observations), kernel);
}

Prediction gp_predict(const GpPosterior& posterior, std::span<const double> x) {
  return posterior.predict(x);
}

double ucb(double mean, double variance, double kappa) {
  if (variance < 0.0) throw DomainError("variance must be non-negative");
  return mean + kappa * std::sqrt(variance);
}

namespace {

double acquisition(const GpPosterior& post, std::span<const double> x, double kappa) {
  const auto pred = post.predict(x);
  return ucb(pred.mean, pred.variance, kappa);
}

// Compass search from `start`; returns the local maximizer and its value.
std::pair<std::vector<double>, double> compass_search(const GpPosterior& post, const Box& box,
                                                      std::vector<double> x, double kappa,
                                                      const AcquisitionOptions& options) {
  const std::size_t d = x.size();
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = 0.25 * (box.upper[i] - box.lower[i]);
  double value = acquisition(post, x, kappa);
  std::size_t evals = 1;

  auto active = [&] {
    for (std::size_t i = 0; i < d; ++i) {
      if (step[i] > options.min_step * (box.upper[i] - box.lower[i])) return true;
    }
    return false;
  };

  while (active() && evals < options.max_evals_per_start) {
    bool improved = false;
    for (std::size_t i = 0; i < d && evals < options.max_evals_per_start; ++i) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> trial = x;
        trial[i] = std::clamp(trial[i] + dir * step[i], box.lower[i], box.upper[i]);
        if (trial[i] == x[i]) continue;
        const double v = acquisition(post, trial, kappa);
        ++evals;
        if (v > value) {
          x = std::move(trial);
          value = v;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      for (auto& s : step) s *= 0.5;
    }
  }
  return {std::move(x), value};
}

}  // namespace

std::vector<double> maximize_acquisition(const GpPosterior& posterior, const Box& bounds,
                                         double kappa, std::uint64_t seed,
                                         const AcquisitionOptions& options) {
  if (bounds.dim() != posterior.dim()) throw DomainError("box dimension does not match the GP");
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    if (!std::isfinite(bounds.lower[i]) || !std::isfinite(bounds.upper[i])) {
      throw DomainError("acquisition search needs a finite box");
    }
  }
  if (kappa < 0.0) throw DomainError("kappa must be non-negative");

  std::vector<std::vector<double>> starts;
  Rng rng(seed);
  for (std::size_t s = 0; s < options.starts; ++s) {
    std::vector<double> x(bounds.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
    starts.push_back(std::move(x));
  }
  const auto& obs = posterior.observations();
  const auto incumbent = static_cast<std::size_t>(
      std::max_element(obs.begin(), obs.end()) - obs.begin());
  if (bounds.contains(posterior.points()[incumbent])) {
    starts.push_back(posterior.points()[incumbent]);
  }

  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    auto [x, value] = compass_search(posterior, bounds, std::move(start), kappa, options);
    if (value > best_value) {
      best_value = value;
      best = std::move(x);
    }
  }
  return best;
}

void BoHistory::add(std::vector<double> point, double value) {
  if (trials.empty() || value > best_value) {
    best_value = value;
    best_point = point;
  }
  trials.push_back({std::move(point), value});
}

std::vector<double> BoHistory::best_so_far() const {
  std::vector<double> out;
  out.reserve(trials.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    best = std::max(best, t.value);
    out.push_back(best);
  }
  return out;
}

namespace {

double radical_inverse(std::size_t index, std::size_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

std::vector<std::size_t> first_primes(std::size_t count) {
  std::vector<std::size_t> primes;
  for (std::size_t c = 2; primes.size() < count; ++c) {
    bool is_prime = true;
    for (std::size_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(c);
  }
  return primes;
}

}  // namespace

std::vector<double> halton_point(std::size_t index, std::span<const double> shift) {
  const auto primes = first_primes(shift.size());
  std::vector<double> u(shift.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = radical_inverse(index, primes[i]) + shift[i];
    u[i] = v - std::floor(v);
  }
  return u;
}

BoHistory bayes_opt(const Objective& objective, const Box& bounds, const BayesOptOptions& options) {
  if (options.rounds == 0) throw DomainError("bayes_opt needs at least one round");
  if (options.n_init == 0) throw DomainError("bayes_opt needs at least one initial point");
  const std::size_t d = bounds.dim();
  if (d == 0) throw DomainError("bayes_opt needs a non-empty box");
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(bounds.lower[i]) || !std::isfinite(bounds.upper[i])) {
      throw DomainError("bayes_opt needs a finite box");
    }
  }

  const Box unit(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
  auto to_box = [&](std::span<const double> u) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = std::clamp(bounds.lower[i] + u[i] * (bounds.upper[i] - bounds.lower[i]),
                        bounds.lower[i], bounds.upper[i]);
    }
    return x;
  };

  BoHistory history;
  std::vector<std::vector<double>> unit_points;
  auto evaluate = [&](std::vector<double> u) {
    auto x = to_box(u);
    double value = 0.0;
    try {
      value = objective(x);
    } catch (const std::exception& e) {
      throw BayesOptAborted(std::string("objective evaluation failed: ") + e.what(), history);
    }
    if (!std::isfinite(value)) {
      throw BayesOptAborted("objective returned a non-finite value", history);
    }
    unit_points.push_back(std::move(u));
    history.add(std::move(x), value);
  };

  Rng shift_rng = Rng::substream(options.seed, 1);
  std::vector<double> shift(d);
  for (auto& s : shift) s = shift_rng.uniform();
  for (std::size_t i = 1; i <= options.n_init; ++i) evaluate(halton_point(i, shift));

  for (std::size_t round = 1; round <= options.rounds; ++round) {
    std::vector<double> y;
    y.reserve(history.trials.size());
    for (const auto& t : history.trials) y.push_back(t.value);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = y.size() > 1 ? std::sqrt(var / static_cast<double>(y.size() - 1)) : 0.0;
    const double scale = sd > 0.0 ? sd : 1.0;
    for (auto& v : y) v = (v - mean) / scale;

    const auto posterior = gp_fit(unit_points, std::move(y), options.kernel);
    evaluate(maximize_acquisition(posterior, unit, options.kappa,
                                  derive_seed(options.seed, 100 + round), options.acquisition));
  }
  return history;
}

}  // namespace qmimo
