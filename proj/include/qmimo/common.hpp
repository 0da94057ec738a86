#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmimo {

/// Invalid argument or dimension mismatch.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A size cap (qubits, exhaustive enumeration) would be exceeded.
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown, e.g. a kernel matrix that stays indefinite.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// BPSK symbols / Ising spins, every entry is -1 or +1.
using SpinVector = std::vector<int>;

inline constexpr std::size_t kDefaultExhaustiveCap = 20;

// Basis convention shared by every module: bit k of a basis index (LSB first)
// is qubit / antenna k, and bit value 1 is the spin -1 eigenstate of sigma_z.

inline int spin_of_bit(std::uint64_t index, std::size_t k) {
  return ((index >> k) & 1U) ? -1 : 1;
}

inline SpinVector spins_from_index(std::uint64_t index, std::size_t n) {
  SpinVector x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = spin_of_bit(index, k);
  return x;
}

inline std::uint64_t index_from_spins(std::span<const int> x) {
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == -1) {
      index |= std::uint64_t{1} << k;
    } else if (x[k] != 1) {
      throw DomainError("spin entries must be -1 or +1");
    }
  }
  return index;
}

/// Axis-aligned box; infinite bounds are allowed.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw DomainError("box bound lengths differ");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!(lower[i] <= upper[i])) throw DomainError("box lower bound exceeds upper bound");
    }
  }

  static Box unbounded(std::size_t dim) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Box(std::vector<double>(dim, -inf), std::vector<double>(dim, inf));
  }

  std::size_t dim() const { return lower.size(); }

  bool contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
  }

  std::vector<double> clamp(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i] < lower[i]) out[i] = lower[i];
      if (out[i] > upper[i]) out[i] = upper[i];
    }
    return out;
  }
};

}  // namespace qmimo
