#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qmimo/common.hpp"
#include "qmimo/ising.hpp"

namespace qmimo {

/// Depth-p QAOA angles. Flat layout used by the optimizers is
/// [gamma_1..gamma_p, beta_1..beta_p].
struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;

  QaoaParams() = default;
  QaoaParams(std::vector<double> g, std::vector<double> b);

  std::size_t depth() const { return gammas.size(); }
  std::vector<double> flat() const;
  static QaoaParams from_flat(std::span<const double> angles);
};

/// Dense n-qubit pure state. Amplitude index m: bit k (LSB first) is qubit k.
struct Statevector {
  std::size_t n = 0;
  std::vector<std::complex<double>> amplitudes;

  double norm_squared() const;
  double probability(std::uint64_t index) const { return std::norm(amplitudes.at(index)); }
  std::vector<double> probabilities() const;
};

/// Qubit cap: 20 unless the QAOA_MIMO_MAX_QUBITS environment variable says otherwise.
std::size_t max_qubits();
void check_qubit_cap(std::size_t n);

/// Energies of every computational basis state (offset excluded).
std::vector<double> hc_diagonal(const IsingModel& model);

Statevector uniform_state(std::size_t n);

/// exp(-i beta X) on every qubit, i.e. R_x(2 beta) per qubit.
void apply_mixer(Statevector& state, double beta);

/// exp(-i gamma H_C) for a diagonal H_C.
void apply_phase(Statevector& state, std::span<const double> diagonal, double gamma);

Statevector qaoa_state(const IsingModel& model, const QaoaParams& params);

/// <psi|H_C|psi> computed exactly from the amplitudes.
double expectation(const IsingModel& model, const QaoaParams& params);
double expectation(const Statevector& state, std::span<const double> diagonal);

/// Multinomial readout in the computational basis. Keys are bitstrings with
/// qubit 1 leftmost.
std::map<std::string, std::size_t> sample(const Statevector& state, std::size_t shots,
                                          std::uint64_t seed);

/// |<x|psi>|^2 for the basis state encoding spin vector x.
double success_probability(const Statevector& state, std::span<const int> x);

/// Caches the H_C diagonal of one model for repeated evaluations.
class QaoaCircuit {
 public:
  explicit QaoaCircuit(const IsingModel& model);

  std::size_t qubits() const { return n_; }
  const std::vector<double>& diagonal() const { return diagonal_; }

  Statevector state(const QaoaParams& params) const;
  double expectation(const QaoaParams& params) const;

 private:
  std::size_t n_;
  std::vector<double> diagonal_;
};

}  // namespace qmimo
