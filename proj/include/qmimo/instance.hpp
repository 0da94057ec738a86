#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmimo/common.hpp"

namespace qmimo {

/// One real-valued MIMO detection problem: y = H x_true + noise.
struct ChannelInstance {
  std::size_t n_t = 0;
  std::size_t n_r = 0;
  Eigen::MatrixXd h;  // n_r x n_t
  SpinVector x_true;
  Eigen::VectorXd noise;
  Eigen::VectorXd y;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

/// RNG substreams used by generate_instance.
enum class InstanceStream : std::uint64_t { Channel = 1, Symbols = 2, Noise = 3 };

/// H and noise i.i.d. normal (noise scaled by noise_scale), x_true uniform over
/// {-1,+1}^n_t. H is filled row-major from its own substream.
ChannelInstance generate_instance(std::size_t n_t, std::size_t n_r, double noise_scale,
                                  std::uint64_t seed);

/// Assembles an instance from explicit parts; y is computed as h*x_true + noise.
ChannelInstance make_instance(Eigen::MatrixXd h, SpinVector x_true, Eigen::VectorXd noise,
                              std::uint64_t seed = 0, double noise_scale = 1.0);

/// Checks shapes and the y = Hx + n relation; throws DomainError.
void validate(const ChannelInstance& inst);

/// ||y - H x||^2.
double ml_objective(const ChannelInstance& inst, std::span<const int> x);

struct Detection {
  SpinVector x_best;
  double value = 0.0;
  std::uint64_t index = 0;  // enumeration index of x_best
};

/// Exhaustive ML detection over all 2^n_t candidates in enumeration order;
/// ties keep the lowest index.
Detection brute_force_detect(const ChannelInstance& inst,
                             std::size_t cap = kDefaultExhaustiveCap);

/// `count` instances with n_t drawn uniformly from `n_t_choices`. n_r = n_t
/// when `n_r` is 0. Instance i is seeded with derive_seed(master_seed, i).
std::vector<ChannelInstance> generate_batch(std::size_t count,
                                            std::span<const std::size_t> n_t_choices,
                                            std::size_t n_r, double noise_scale,
                                            std::uint64_t master_seed);

}  // namespace qmimo
