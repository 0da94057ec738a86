#pragma once

#include <cstdint>
#include <random>

namespace qmimo {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of substream `stream` under `master`. Distinct streams are decorrelated
/// through the SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Portable random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; all variates are derived from raw 64-bit
/// draws here rather than through <random> distributions, which are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t master, std::uint64_t stream) {
    return Rng(derive_seed(master, stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box–Muller (cosine branch, one variate per pair of
  /// uniforms, u1 = 1 - uniform() so the log argument is in (0, 1]).
  double normal();

  /// +1 or -1 from the top bit of one draw.
  int spin() { return (next_u64() >> 63) ? -1 : 1; }

  /// Integer in [0, n) by modulo reduction.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qmimo
