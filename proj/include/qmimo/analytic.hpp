#pragma once

#include <cstddef>

#include "qmimo/ising.hpp"

namespace qmimo {

// Closed-form depth-1 QAOA expectations for the MIMO Ising model, written in
// terms of A and b. Neighbour products run over the complete graph, so a zero
// coupling contributes a factor cos(0) = 1. Cost is O(n) per term and O(n^3)
// for the full expectation, against O(n 2^n) for the statevector.

/// <Z_i> after one layer:
///   -sin(2 beta) sin(4 gamma b_i) prod_{k != i} cos(4 gamma A_ik)
double c1_single(const IsingModel& model, std::size_t i, double gamma, double beta);

/// <Z_i Z_j> after one layer (i != j), with R = {k : k != i, k != j}:
///   1/2 sin(4 beta) sin(4 gamma A_ij) [cos(4 gamma b_j) prod_R cos(4 gamma A_jk)
///                                    + cos(4 gamma b_i) prod_R cos(4 gamma A_ik)]
/// - 1/2 sin^2(2 beta) cos(4 gamma (b_i + b_j)) prod_R cos(4 gamma (A_ik + A_jk))
/// + 1/2 sin^2(2 beta) cos(4 gamma (b_j - b_i)) prod_R cos(4 gamma (A_jk - A_ik))
///
/// The squared-sine terms carry no cos^2(4 gamma A_ij) factor; that variant
/// disagrees with exact simulation and is not used.
double c1_pair(const IsingModel& model, std::size_t i, std::size_t j, double gamma, double beta);

/// sum_{i<j} 2 A_ij <Z_i Z_j> - sum_k 2 b_k <Z_k>.
double c1_expectation(const IsingModel& model, double gamma, double beta);

}  // namespace qmimo
