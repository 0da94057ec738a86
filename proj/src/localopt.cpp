#include "qmimo/localopt.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace qmimo {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ToleranceReached:
      return "tolerance_reached";
    case StopReason::BudgetExhausted:
      return "budget_exhausted";
    case StopReason::DegenerateSimplex:
      return "degenerate_simplex";
  }
  return "unknown";
}

std::vector<double> OptTrace::running_best() const {
  std::vector<double> out;
  out.reserve(evaluations.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : evaluations) {
    best = std::min(best, e.value);
    out.push_back(best);
  }
  return out;
}

std::vector<double> box_trust_step(std::span<const double> gradient,
                                   std::span<const double> lower,
                                   std::span<const double> upper, double radius) {
  const std::size_t n = gradient.size();
  auto step_at = [&](double t) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::clamp(-t * gradient[i], lower[i], upper[i]);
    return d;
  };
  auto norm = [](const std::vector<double>& d) {
    double s = 0.0;
    for (double v : d) s += v * v;
    return std::sqrt(s);
  };

  double gnorm = 0.0;
  for (double g : gradient) gnorm += g * g;
  gnorm = std::sqrt(gnorm);
  if (gnorm == 0.0 || radius <= 0.0) return std::vector<double>(n, 0.0);

  // |clip(-t g)| is continuous and non-decreasing in t.
  double lo = 0.0;
  double hi = radius / gnorm;
  while (norm(step_at(hi)) < radius) {
    const double next = 2.0 * hi;
    if (norm(step_at(next)) <= norm(step_at(hi))) return step_at(next);  // box-limited
    hi = next;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm(step_at(mid)) < radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  auto d = step_at(hi);
  const double len = norm(d);
  if (len > radius) {
    for (auto& v : d) v *= radius / len;
  }
  return d;
}

namespace {

struct BudgetExhausted {};

class BoundedCobyla {
 public:
  BoundedCobyla(const std::function<double(std::span<const double>)>& objective, const Box& box,
                const MinimizeOptions& options)
      : objective_(objective), box_(box), options_(options) {}

  OptTrace run(std::span<const double> x0) {
    const std::size_t n = x0.size();
    if (box_.dim() != n) throw DomainError("bounds dimension does not match x0");
    if (options_.budget == 0) throw DomainError("budget must be at least 1");

    double rho = options_.rho_begin;
    for (std::size_t i = 0; i < n; ++i) {
      const double width = box_.upper[i] - box_.lower[i];
      if (std::isfinite(width)) rho = std::min(rho, 0.5 * width);
    }
    if (!(rho > 0.0)) throw DomainError("box has zero width in some coordinate");
    const double rho_end = std::min(options_.tol, rho);

    try {
      const auto start = box_.clamp(x0);
      build_simplex(start, evaluate(start), rho);
      iterate(rho, rho_end);
    } catch (const BudgetExhausted&) {
      trace_.converged = false;
      trace_.reason = StopReason::BudgetExhausted;
    }
    return std::move(trace_);
  }

 private:
  static constexpr double kAlpha = 0.25;  // min acceptable simplex "height" / rho
  static constexpr double kBeta = 2.1;    // max acceptable edge length / rho
  static constexpr double kGamma = 0.5;   // geometry-step length / rho
  static constexpr double kDelta = 1.1;

  double evaluate(const std::vector<double>& x) {
    if (trace_.evaluations.size() >= options_.budget) throw BudgetExhausted{};
    double value = 0.0;
    try {
      value = objective_(x);
    } catch (const std::exception& e) {
      throw MinimizeAborted(std::string("objective evaluation failed: ") + e.what(),
                            std::move(trace_));
    }
    if (std::isnan(value)) throw MinimizeAborted("objective returned NaN", std::move(trace_));
    trace_.evaluations.push_back({x, value});
    if (value < trace_.best_value) {
      trace_.best_value = value;
      trace_.best_point = x;
    }
    return value;
  }

  // Axis-aligned simplex: x plus or minus rho along each coordinate.
  void build_simplex(const std::vector<double>& x, double fx, double rho) {
    vertices_.assign(1, x);
    values_.assign(1, fx);
    for (std::size_t j = 0; j < x.size(); ++j) {
      std::vector<double> v = x;
      v[j] = v[j] + rho <= box_.upper[j] ? v[j] + rho : v[j] - rho;
      values_.push_back(evaluate(v));
      vertices_.push_back(std::move(v));
    }
  }

  void iterate(double rho, double rho_end) {
    const std::size_t n = vertices_.front().size();
    const auto dn = static_cast<Eigen::Index>(n);
    bool geometry_pending = false;
    bool just_rebuilt = false;

    for (;;) {
      // Pole = best vertex; the lowest index wins ties.
      const auto pole = static_cast<std::size_t>(
          std::min_element(values_.begin(), values_.end()) - values_.begin());
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j <= n; ++j) {
        if (j != pole) others.push_back(j);
      }
      const std::vector<double> x_pole = vertices_[pole];
      const double f_pole = values_[pole];

      // Columns of sim are the displacements to the other vertices.
      Eigen::MatrixXd sim(dn, dn);
      Eigen::VectorXd df(dn);
      for (Eigen::Index c = 0; c < dn; ++c) {
        for (Eigen::Index r = 0; r < dn; ++r) sim(r, c) = vertices_[others[c]][r] - x_pole[r];
        df(c) = values_[others[c]] - f_pole;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sim);
      Eigen::MatrixXd simi;
      bool degenerate = !lu.isInvertible();
      if (!degenerate) {
        simi = lu.inverse();
        degenerate = ((simi * sim) - Eigen::MatrixXd::Identity(dn, dn)).cwiseAbs().maxCoeff() > 0.1;
      }
      if (degenerate) {
        if (just_rebuilt) {
          finish(StopReason::DegenerateSimplex);
          return;
        }
        build_simplex(vertices_[pole], f_pole, rho);
        just_rebuilt = true;
        continue;
      }
      just_rebuilt = false;
      // Linear model f(x_pole + d) ~ f_pole + g.d interpolating every vertex.
      const Eigen::VectorXd g = simi.transpose() * df;

      const double par_sig = kAlpha * rho;
      const double par_eta = kBeta * rho;
      Eigen::VectorXd vsig(dn), veta(dn);
      bool acceptable = true;
      for (Eigen::Index j = 0; j < dn; ++j) {
        vsig(j) = 1.0 / simi.row(j).norm();
        veta(j) = sim.col(j).norm();
        if (vsig(j) < par_sig || veta(j) > par_eta) acceptable = false;
      }

      if (geometry_pending && !acceptable) {
        geometry_pending = false;
        improve_geometry(others, pole, simi, g, vsig, veta, rho);
        continue;
      }
      geometry_pending = false;

      // Trust-region step on the linear model, restricted to the box.
      std::vector<double> lo(n), hi(n), grad(n);
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = box_.lower[i] - x_pole[i];
        hi[i] = box_.upper[i] - x_pole[i];
        grad[i] = g(static_cast<Eigen::Index>(i));
      }
      const auto step = box_trust_step(grad, lo, hi, rho);
      Eigen::VectorXd dx(dn);
      for (Eigen::Index i = 0; i < dn; ++i) dx(i) = step[static_cast<std::size_t>(i)];

      bool reduce = false;
      if (dx.squaredNorm() < 0.25 * rho * rho) {
        reduce = true;
      } else {
        const double predicted = -g.dot(dx);
        std::vector<double> x_new(n);
        for (std::size_t i = 0; i < n; ++i) {
          x_new[i] = std::clamp(x_pole[i] + step[i], box_.lower[i], box_.upper[i]);
        }
        const double f_new = evaluate(x_new);
        const double actual = f_pole - f_new;

        // Choose the vertex to replace by x_new.
        double ratio = actual <= 0.0 ? 1.0 : 0.0;
        std::ptrdiff_t drop = -1;
        Eigen::VectorXd sigbar(dn);
        for (Eigen::Index j = 0; j < dn; ++j) {
          const double t = std::abs(simi.row(j).dot(dx));
          if (t > ratio) {
            drop = j;
            ratio = t;
          }
          sigbar(j) = t * vsig(j);
        }
        double edge_max = kDelta * rho;
        std::ptrdiff_t far = -1;
        for (Eigen::Index j = 0; j < dn; ++j) {
          if (sigbar(j) >= par_sig || sigbar(j) >= vsig(j)) {
            double t = veta(j);
            if (actual > 0.0) t = (dx - sim.col(j)).norm();
            if (t > edge_max) {
              far = j;
              edge_max = t;
            }
          }
        }
        if (far >= 0) drop = far;

        if (drop < 0) {
          reduce = true;
        } else {
          const std::size_t target = others[static_cast<std::size_t>(drop)];
          vertices_[target] = std::move(x_new);
          values_[target] = f_new;
          if (!(actual > 0.0 && actual >= 0.1 * predicted)) reduce = true;
        }
      }

      if (reduce) {
        if (!acceptable) {
          geometry_pending = true;
          continue;
        }
        if (rho > rho_end) {
          rho *= 0.5;
          if (rho <= 1.5 * rho_end) rho = rho_end;
          continue;
        }
        finish(StopReason::ToleranceReached);
        return;
      }
    }
  }

  // Replaces the vertex that most spoils the simplex shape with a point moved
  // off the opposite face. The move maximizes the distance from that face
  // within the box and a ball of radius gamma*rho, preferring the side where
  // the linear model decreases.
  void improve_geometry(const std::vector<std::size_t>& others, std::size_t pole,
                        const Eigen::MatrixXd& simi, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& vsig, const Eigen::VectorXd& veta, double rho) {
    const Eigen::Index dn = simi.rows();
    Eigen::Index drop = -1;
    double worst = kBeta * rho;
    for (Eigen::Index j = 0; j < dn; ++j) {
      if (veta(j) > worst) {
        drop = j;
        worst = veta(j);
      }
    }
    if (drop < 0) {
      double smallest = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < dn; ++j) {
        if (vsig(j) < smallest) {
          drop = j;
          smallest = vsig(j);
        }
      }
    }

    const auto& x_pole = vertices_[pole];
    const std::size_t n = x_pole.size();
    std::vector<double> lo(n), hi(n), normal(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = box_.lower[i] - x_pole[i];
      hi[i] = box_.upper[i] - x_pole[i];
      normal[i] = simi(drop, static_cast<Eigen::Index>(i));
    }
    // box_trust_step minimizes w.d, so w = -normal pushes along +normal.
    std::vector<double> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -normal[i];
    const auto up = box_trust_step(neg, lo, hi, kGamma * rho);
    const auto down = box_trust_step(normal, lo, hi, kGamma * rho);
    auto height = [&](const std::vector<double>& d) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += normal[i] * d[i];
      return std::abs(s);
    };
    auto model = [&](const std::vector<double>& d) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += g(static_cast<Eigen::Index>(i)) * d[i];
      return s;
    };
    const double h_up = height(up), h_down = height(down);
    const bool up_descends = model(up) <= model(down);
    const auto& dx = up_descends ? (h_up >= 0.5 * h_down ? up : down)
                                 : (h_down >= 0.5 * h_up ? down : up);

    std::vector<double> x_new(n);
    for (std::size_t i = 0; i < n; ++i) {
      x_new[i] = std::clamp(x_pole[i] + dx[i], box_.lower[i], box_.upper[i]);
    }
    const double f_new = evaluate(x_new);
    const std::size_t target = others[static_cast<std::size_t>(drop)];
    vertices_[target] = std::move(x_new);
    values_[target] = f_new;
  }

  void finish(StopReason reason) {
    trace_.reason = reason;
    trace_.converged = reason == StopReason::ToleranceReached;
  }

  const std::function<double(std::span<const double>)>& objective_;
  const Box& box_;
  MinimizeOptions options_;
  std::vector<std::vector<double>> vertices_;
  std::vector<double> values_;
  OptTrace trace_;
};

}  // namespace

OptTrace minimize(const std::function<double(std::span<const double>)>& objective,
                  std::span<const double> x0, const Box& bounds, const MinimizeOptions& options) {
  if (x0.empty()) throw DomainError("x0 must be non-empty");
  BoundedCobyla solver(objective, bounds, options);
  return solver.run(x0);
}

}  // namespace qmimo
