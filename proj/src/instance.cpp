#include "qmimo/instance.hpp"

#include <cmath>
#include <string>

#include "qmimo/rng.hpp"

namespace qmimo {

namespace {

constexpr std::uint64_t kBatchPickerStream = 0xB47C'0000'0000'0001ULL;

void check_spins(const ChannelInstance& inst, std::span<const int> x) {
  if (x.size() != inst.n_t) {
    throw DomainError("spin vector has length " + std::to_string(x.size()) + ", expected " +
                      std::to_string(inst.n_t));
  }
  for (int s : x) {
    if (s != 1 && s != -1) throw DomainError("spin entries must be -1 or +1");
  }
}

}  // namespace

ChannelInstance generate_instance(std::size_t n_t, std::size_t n_r, double noise_scale,
                                  std::uint64_t seed) {
  if (n_t == 0 || n_r == 0) throw DomainError("n_t and n_r must be positive");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw DomainError("noise_scale must be a finite non-negative number");
  }

  Rng channel = Rng::substream(seed, static_cast<std::uint64_t>(InstanceStream::Channel));
  Rng symbols = Rng::substream(seed, static_cast<std::uint64_t>(InstanceStream::Symbols));
  Rng noise_rng = Rng::substream(seed, static_cast<std::uint64_t>(InstanceStream::Noise));

  Eigen::MatrixXd h(n_r, n_t);
  for (std::size_t r = 0; r < n_r; ++r) {
    for (std::size_t c = 0; c < n_t; ++c) h(r, c) = channel.normal();
  }
  SpinVector x(n_t);
  for (auto& s : x) s = symbols.spin();
  Eigen::VectorXd noise(n_r);
  for (std::size_t r = 0; r < n_r; ++r) noise(r) = noise_scale * noise_rng.normal();

  return make_instance(std::move(h), std::move(x), std::move(noise), seed, noise_scale);
}

ChannelInstance make_instance(Eigen::MatrixXd h, SpinVector x_true, Eigen::VectorXd noise,
                              std::uint64_t seed, double noise_scale) {
  ChannelInstance inst;
  inst.n_r = static_cast<std::size_t>(h.rows());
  inst.n_t = static_cast<std::size_t>(h.cols());
  if (inst.n_t == 0 || inst.n_r == 0) throw DomainError("channel matrix must be non-empty");
  if (static_cast<std::size_t>(noise.size()) != inst.n_r) {
    throw DomainError("noise length does not match channel rows");
  }
  inst.h = std::move(h);
  inst.x_true = std::move(x_true);
  check_spins(inst, inst.x_true);
  inst.noise = std::move(noise);

  Eigen::VectorXd x(inst.n_t);
  for (std::size_t k = 0; k < inst.n_t; ++k) x(k) = inst.x_true[k];
  inst.y = inst.h * x + inst.noise;
  inst.seed = seed;
  inst.noise_scale = noise_scale;
  return inst;
}

void validate(const ChannelInstance& inst) {
  if (inst.n_t == 0 || inst.n_r == 0) throw DomainError("n_t and n_r must be positive");
  if (static_cast<std::size_t>(inst.h.rows()) != inst.n_r ||
      static_cast<std::size_t>(inst.h.cols()) != inst.n_t) {
    throw DomainError("channel matrix shape does not match n_r x n_t");
  }
  if (static_cast<std::size_t>(inst.y.size()) != inst.n_r ||
      static_cast<std::size_t>(inst.noise.size()) != inst.n_r) {
    throw DomainError("y/noise length does not match n_r");
  }
  check_spins(inst, inst.x_true);
  Eigen::VectorXd x(inst.n_t);
  for (std::size_t k = 0; k < inst.n_t; ++k) x(k) = inst.x_true[k];
  const double residual = (inst.y - inst.h * x - inst.noise).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-12 * (1.0 + inst.y.cwiseAbs().maxCoeff()))) {
    throw DomainError("y differs from H*x_true + noise");
  }
}

double ml_objective(const ChannelInstance& inst, std::span<const int> x) {
  check_spins(inst, x);
  double total = 0.0;
  for (std::size_t r = 0; r < inst.n_r; ++r) {
    double residual = inst.y(r);
    for (std::size_t c = 0; c < inst.n_t; ++c) residual -= inst.h(r, c) * x[c];
    total += residual * residual;
  }
  return total;
}

Detection brute_force_detect(const ChannelInstance& inst, std::size_t cap) {
  if (inst.n_t > cap || inst.n_t >= 63) {
    throw ResourceLimitError("exhaustive detection over " + std::to_string(inst.n_t) +
                             " antennas exceeds the cap of " + std::to_string(cap));
  }
  const std::uint64_t total = std::uint64_t{1} << inst.n_t;
  Detection best;
  best.value = std::numeric_limits<double>::infinity();
  SpinVector x(inst.n_t);
  for (std::uint64_t m = 0; m < total; ++m) {
    for (std::size_t k = 0; k < inst.n_t; ++k) x[k] = spin_of_bit(m, k);
    const double value = ml_objective(inst, x);
    if (value < best.value) {
      best.value = value;
      best.index = m;
    }
  }
  best.x_best = spins_from_index(best.index, inst.n_t);
  return best;
}

std::vector<ChannelInstance> generate_batch(std::size_t count,
                                            std::span<const std::size_t> n_t_choices,
                                            std::size_t n_r, double noise_scale,
                                            std::uint64_t master_seed) {
  if (n_t_choices.empty()) throw DomainError("at least one n_t choice is required");
  Rng picker = Rng::substream(master_seed, kBatchPickerStream);
  std::vector<ChannelInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n_t = n_t_choices[picker.below(n_t_choices.size())];
    out.push_back(generate_instance(n_t, n_r == 0 ? n_t : n_r, noise_scale,
                                    derive_seed(master_seed, i)));
  }
  return out;
}

}  // namespace qmimo
