#include "qmimo/analytic.hpp"

#include <cmath>

#include "qmimo/common.hpp"

namespace qmimo {

namespace {

void check_index(const IsingModel& model, std::size_t i) {
  if (i >= model.n) throw DomainError("spin index out of range");
}

}  // namespace

double c1_single(const IsingModel& model, std::size_t i, double gamma, double beta) {
  check_index(model, i);
  double prod = 1.0;
  for (std::size_t k = 0; k < model.n; ++k) {
    if (k != i) prod *= std::cos(4.0 * gamma * model.a(i, k));
  }
  return -std::sin(2.0 * beta) * std::sin(4.0 * gamma * model.b(i)) * prod;
}

double c1_pair(const IsingModel& model, std::size_t i, std::size_t j, double gamma, double beta) {
  check_index(model, i);
  check_index(model, j);
  if (i == j) throw DomainError("pair term needs two distinct spins");

  const auto& a = model.a;
  const auto& b = model.b;
  double prod_i = 1.0;
  double prod_j = 1.0;
  double prod_sum = 1.0;
  double prod_diff = 1.0;
  for (std::size_t k = 0; k < model.n; ++k) {
    if (k == i || k == j) continue;
    prod_i *= std::cos(4.0 * gamma * a(i, k));
    prod_j *= std::cos(4.0 * gamma * a(j, k));
    prod_sum *= std::cos(4.0 * gamma * (a(i, k) + a(j, k)));
    prod_diff *= std::cos(4.0 * gamma * (a(j, k) - a(i, k)));
  }

  const double s2 = std::sin(2.0 * beta);
  const double cross = 0.5 * std::sin(4.0 * beta) * std::sin(4.0 * gamma * a(i, j));
  const double linear = cross * (std::cos(4.0 * gamma * b(j)) * prod_j +
                                 std::cos(4.0 * gamma * b(i)) * prod_i);
  const double quadratic = 0.5 * s2 * s2 *
                           (std::cos(4.0 * gamma * (b(j) - b(i))) * prod_diff -
                            std::cos(4.0 * gamma * (b(i) + b(j))) * prod_sum);
  return linear + quadratic;
}

double c1_expectation(const IsingModel& model, double gamma, double beta) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.n; ++i) {
    for (std::size_t j = i + 1; j < model.n; ++j) {
      total += 2.0 * model.a(i, j) * c1_pair(model, i, j, gamma, beta);
    }
  }
  for (std::size_t k = 0; k < model.n; ++k) {
    total -= 2.0 * model.b(k) * c1_single(model, k, gamma, beta);
  }
  return total;
}

}  // namespace qmimo
