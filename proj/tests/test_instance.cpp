#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <functional>

#include "qmimo/instance.hpp"
#include "qmimo/rng.hpp"

using namespace qmimo;

namespace {

ChannelInstance identity_instance(Eigen::Vector2d y) {
  // x_true = [1, 1], noise chosen so that H x_true + noise = y.
  return make_instance(Eigen::Matrix2d::Identity(), {1, 1}, y - Eigen::Vector2d(1.0, 1.0));
}

// Second exhaustive scan, written recursively over antennas with Eigen norms.
std::pair<SpinVector, double> recursive_scan(const ChannelInstance& inst) {
  SpinVector best;
  double best_value = std::numeric_limits<double>::infinity();
  std::uint64_t best_rank = 0;
  SpinVector x(inst.n_t);
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t k, std::uint64_t rank) {
    if (k == inst.n_t) {
      Eigen::VectorXd xv(inst.n_t);
      for (std::size_t i = 0; i < inst.n_t; ++i) xv(i) = x[i];
      const double v = (inst.y - inst.h * xv).squaredNorm();
      if (v < best_value || (v == best_value && rank < best_rank)) {
        best_value = v;
        best = x;
        best_rank = rank;
      }
      return;
    }
    for (int s : {1, -1}) {
      x[k] = s;
      rec(k + 1, rank | (s == -1 ? (std::uint64_t{1} << k) : 0));
    }
  };
  rec(0, 0);
  return {best, best_value};
}

}  // namespace

TEST_CASE("generate_instance shape and invariants") {
  const auto inst = generate_instance(2, 2, 1.0, 7);
  CHECK(inst.h.rows() == 2);
  CHECK(inst.h.cols() == 2);
  CHECK(inst.y.size() == 2);
  CHECK(inst.x_true.size() == 2);
  for (int s : inst.x_true) CHECK((s == 1 || s == -1));

  const auto big = generate_instance(5, 7, 1.0, 99);
  Eigen::VectorXd x(5);
  for (int i = 0; i < 5; ++i) x(i) = big.x_true[i];
  CHECK((big.y - big.h * x - big.noise).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("generate_instance is deterministic in the seed") {
  const auto a = generate_instance(3, 3, 1.0, 7);
  const auto b = generate_instance(3, 3, 1.0, 7);
  CHECK(a.h == b.h);
  CHECK(a.x_true == b.x_true);
  CHECK(a.noise == b.noise);
  CHECK(a.y == b.y);
  const auto c = generate_instance(3, 3, 1.0, 8);
  CHECK(a.h != c.h);
}

TEST_CASE("zero noise gives y = H x_true exactly") {
  const auto inst = generate_instance(4, 4, 0.0, 1);
  Eigen::VectorXd x(4);
  for (int i = 0; i < 4; ++i) x(i) = inst.x_true[i];
  CHECK(inst.y == inst.h * x);
}

TEST_CASE("generate_instance rejects empty dimensions") {
  CHECK_THROWS_AS(generate_instance(0, 2, 1.0, 1), DomainError);
  CHECK_THROWS_AS(generate_instance(2, 0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(generate_instance(2, 2, -1.0, 1), DomainError);
}

TEST_CASE("generated entries look standard normal") {
  // 20000 channel draws: sample mean and variance within loose bounds.
  const auto inst = generate_instance(100, 200, 1.0, 3);
  const double mean = inst.h.mean();
  const double var = (inst.h.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
  int plus = 0;
  for (int s : inst.x_true) plus += s == 1;
  CHECK(plus > 25);
  CHECK(plus < 75);
}

TEST_CASE("ml_objective on the identity channel") {
  const auto inst = identity_instance({1.0, 1.0});
  CHECK(ml_objective(inst, SpinVector{1, 1}) == 0.0);
  CHECK(ml_objective(inst, SpinVector{-1, -1}) == 8.0);
  CHECK_THROWS_AS(ml_objective(inst, SpinVector{1, 1, 1}), DomainError);
  CHECK_THROWS_AS(ml_objective(inst, SpinVector{1, 0}), DomainError);
}

TEST_CASE("ml_objective matches an independent evaluation") {
  const auto inst = generate_instance(3, 3, 1.0, 11);
  for (std::uint64_t m = 0; m < 8; ++m) {
    const auto x = spins_from_index(m, 3);
    double direct = 0.0;
    for (int r = 0; r < 3; ++r) {
      const double hx = inst.h(r, 0) * x[0] + inst.h(r, 1) * x[1] + inst.h(r, 2) * x[2];
      direct += (inst.y(r) - hx) * (inst.y(r) - hx);
    }
    CHECK(ml_objective(inst, x) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(std::abs(ml_objective(inst, x) - direct) <= 1e-12);
  }
}

TEST_CASE("brute_force_detect on hand cases") {
  const auto exact = brute_force_detect(identity_instance({1.0, -1.0}));
  CHECK(exact.x_best == SpinVector{1, -1});
  CHECK(exact.value == 0.0);

  const auto tie = brute_force_detect(identity_instance({0.0, 0.0}));
  CHECK(tie.index == 0);
  CHECK(tie.x_best == SpinVector{1, 1});
  CHECK(tie.value == 2.0);
}

TEST_CASE("brute_force_detect matches a second exhaustive scan") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_instance(6, 6, 1.0, 500 + seed);
    const auto got = brute_force_detect(inst);
    const auto [x, value] = recursive_scan(inst);
    CHECK(got.x_best == x);
    CHECK(got.value == doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("brute_force_detect enforces the cap") {
  const auto inst = generate_instance(6, 6, 1.0, 1);
  CHECK_THROWS_AS(brute_force_detect(inst, 5), ResourceLimitError);
  CHECK_NOTHROW(brute_force_detect(inst, 6));
}

TEST_CASE("ML objective properties") {
  Rng rng(2024);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const auto inst = generate_instance(n, n + rng.below(3), 1.0, rng.next_u64());
    const auto best = brute_force_detect(inst);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const double v = ml_objective(inst, spins_from_index(m, n));
      CHECK(v >= 0.0);
      CHECK(best.value <= v);
    }
  }
}

TEST_CASE("noise-free detection recovers the transmitted symbols") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_instance(5, 6, 0.0, seed);
    // A Gaussian 6x5 matrix has full column rank with probability one.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(inst.h);
    REQUIRE(lu.rank() == 5);
    CHECK(brute_force_detect(inst).x_best == inst.x_true);
  }
}

TEST_CASE("generate_batch draws n_t from the choices") {
  const std::array<std::size_t, 2> choices{2, 3};
  const auto batch = generate_batch(100, choices, 0, 1.0, 42);
  REQUIRE(batch.size() == 100);
  int twos = 0;
  for (const auto& inst : batch) {
    CHECK((inst.n_t == 2 || inst.n_t == 3));
    CHECK(inst.n_r == inst.n_t);
    twos += inst.n_t == 2;
  }
  CHECK(twos > 20);
  CHECK(twos < 80);
  const auto again = generate_batch(100, choices, 0, 1.0, 42);
  CHECK(again[17].h == batch[17].h);
  CHECK(batch[0].seed != batch[1].seed);
}
