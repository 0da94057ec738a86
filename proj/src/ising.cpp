#include "qmimo/ising.hpp"

#include <cmath>

namespace qmimo {

IsingModel build_ising(const ChannelInstance& inst) {
  validate(inst);
  Eigen::MatrixXd a = inst.h.transpose() * inst.h;
  // Symmetrize explicitly so a(i,j) and a(j,i) are bit-identical.
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::VectorXd b = inst.h.transpose() * inst.y;
  return ising_from_quadratic(std::move(a), std::move(b), inst.y.squaredNorm());
}

IsingModel ising_from_quadratic(Eigen::MatrixXd a, Eigen::VectorXd b, double yty) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (n == 0 || a.cols() != a.rows() || static_cast<std::size_t>(b.size()) != n) {
    throw DomainError("A must be square and match the length of b");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * (1.0 + std::abs(a(i, j)))) {
        throw DomainError("A must be symmetric");
      }
    }
  }

  IsingModel model;
  model.n = n;
  model.couplings.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      model.couplings.push_back({i, j, 2.0 * a(i, j)});
    }
  }
  model.fields_z = -2.0 * b;
  model.offset = yty + a.trace();
  model.a = std::move(a);
  model.b = std::move(b);
  return model;
}

double ising_energy(const IsingModel& model, std::span<const int> x) {
  if (x.size() != model.n) throw DomainError("spin vector length does not match model size");
  for (int s : x) {
    if (s != 1 && s != -1) throw DomainError("spin entries must be -1 or +1");
  }
  double energy = 0.0;
  for (const auto& c : model.couplings) energy += c.weight * x[c.i] * x[c.j];
  for (std::size_t k = 0; k < model.n; ++k) energy += model.fields_z(k) * x[k];
  return energy;
}

SpinVector decode_state(std::string_view bits) {
  SpinVector x;
  x.reserve(bits.size());
  for (char c : bits) {
    if (c == '1') {
      x.push_back(-1);
    } else if (c == '0') {
      x.push_back(1);
    } else {
      throw DomainError("bitstring may only contain '0' and '1'");
    }
  }
  return x;
}

std::string encode_state(std::span<const int> x) {
  std::string bits;
  bits.reserve(x.size());
  for (int s : x) {
    if (s == -1) {
      bits.push_back('1');
    } else if (s == 1) {
      bits.push_back('0');
    } else {
      throw DomainError("spin entries must be -1 or +1");
    }
  }
  return bits;
}

std::string bitstring_of_index(std::uint64_t index, std::size_t n) {
  std::string bits(n, '0');
  for (std::size_t k = 0; k < n; ++k) {
    if ((index >> k) & 1U) bits[k] = '1';
  }
  return bits;
}

}  // namespace qmimo
