#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qmimo/common.hpp"
#include "qmimo/instance.hpp"

namespace qmimo {

struct Coupling {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double weight = 0.0;  // coefficient of Z_i Z_j, equal to 2 A_ij
};

/// Problem Hamiltonian H_C = sum_{i<j} 2A_ij Z_i Z_j - sum_k 2 b_k Z_k, with
/// A = H^T H and b = H^T y. ml_objective(x) = energy(x) + offset.
struct IsingModel {
  std::size_t n = 0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  // Every unordered pair is present, zero weights included (complete graph).
  std::vector<Coupling> couplings;
  Eigen::VectorXd fields_z;  // -2 b
  double offset = 0.0;       // y^T y + trace(A)
};

IsingModel build_ising(const ChannelInstance& inst);

/// Builds the model directly from A and b. The offset is set to trace(A) + yty.
IsingModel ising_from_quadratic(Eigen::MatrixXd a, Eigen::VectorXd b, double yty = 0.0);

/// Classical energy of spin configuration x under H_C (offset excluded).
double ising_energy(const IsingModel& model, std::span<const int> x);

/// Bitstring (qubit 1 leftmost) to spins: '1' -> -1, '0' -> +1.
SpinVector decode_state(std::string_view bits);

/// Inverse of decode_state.
std::string encode_state(std::span<const int> x);

/// Display string of basis index m over n qubits, qubit 1 leftmost.
std::string bitstring_of_index(std::uint64_t index, std::size_t n);

}  // namespace qmimo
