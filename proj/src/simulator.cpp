#include "qmimo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "qmimo/rng.hpp"

namespace qmimo {

QaoaParams::QaoaParams(std::vector<double> g, std::vector<double> b)
    : gammas(std::move(g)), betas(std::move(b)) {
  if (gammas.size() != betas.size()) throw DomainError("gammas and betas must have equal length");
  if (gammas.empty()) throw DomainError("QAOA depth must be at least 1");
}

std::vector<double> QaoaParams::flat() const {
  std::vector<double> out(gammas);
  out.insert(out.end(), betas.begin(), betas.end());
  return out;
}

QaoaParams QaoaParams::from_flat(std::span<const double> angles) {
  if (angles.empty() || angles.size() % 2 != 0) {
    throw DomainError("flat QAOA angle vector must have even, non-zero length");
  }
  const std::size_t p = angles.size() / 2;
  return QaoaParams(std::vector<double>(angles.begin(), angles.begin() + p),
                    std::vector<double>(angles.begin() + p, angles.end()));
}

double Statevector::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amplitudes) total += std::norm(a);
  return total;
}

std::vector<double> Statevector::probabilities() const {
  std::vector<double> out(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), out.begin(),
                 [](const std::complex<double>& a) { return std::norm(a); });
  return out;
}

std::size_t max_qubits() {
  if (const char* env = std::getenv("QAOA_MIMO_MAX_QUBITS")) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && value > 0 && value < 40) return value;
  }
  return 20;
}

void check_qubit_cap(std::size_t n) {
  const std::size_t cap = max_qubits();
  if (n > cap) {
    throw ResourceLimitError("statevector of " + std::to_string(n) +
                             " qubits exceeds the cap of " + std::to_string(cap));
  }
}

std::vector<double> hc_diagonal(const IsingModel& model) {
  check_qubit_cap(model.n);
  const std::uint64_t dim = std::uint64_t{1} << model.n;
  std::vector<double> diag(dim);
  for (std::uint64_t m = 0; m < dim; ++m) {
    double energy = 0.0;
    for (const auto& c : model.couplings) {
      energy += c.weight * spin_of_bit(m, c.i) * spin_of_bit(m, c.j);
    }
    for (std::size_t k = 0; k < model.n; ++k) energy += model.fields_z(k) * spin_of_bit(m, k);
    diag[m] = energy;
  }
  return diag;
}

Statevector uniform_state(std::size_t n) {
  check_qubit_cap(n);
  const std::uint64_t dim = std::uint64_t{1} << n;
  Statevector s;
  s.n = n;
  s.amplitudes.assign(dim, std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  return s;
}

void apply_mixer(Statevector& state, double beta) {
  const double c = std::cos(beta);
  const std::complex<double> s(0.0, -std::sin(beta));
  const std::uint64_t dim = state.amplitudes.size();
  auto& amp = state.amplitudes;
  for (std::size_t q = 0; q < state.n; ++q) {
    const std::uint64_t stride = std::uint64_t{1} << q;
    for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
      for (std::uint64_t m = base; m < base + stride; ++m) {
        const auto a0 = amp[m];
        const auto a1 = amp[m + stride];
        amp[m] = c * a0 + s * a1;
        amp[m + stride] = s * a0 + c * a1;
      }
    }
  }
}

void apply_phase(Statevector& state, std::span<const double> diagonal, double gamma) {
  if (diagonal.size() != state.amplitudes.size()) {
    throw DomainError("diagonal length does not match the statevector");
  }
  for (std::size_t m = 0; m < diagonal.size(); ++m) {
    state.amplitudes[m] *= std::polar(1.0, -gamma * diagonal[m]);
  }
}

namespace {

Statevector evolve(std::size_t n, std::span<const double> diagonal, const QaoaParams& params) {
  if (params.gammas.size() != params.betas.size() || params.gammas.empty()) {
    throw DomainError("QAOA parameters need p >= 1 gammas and betas");
  }
  Statevector state = uniform_state(n);
  for (std::size_t layer = 0; layer < params.depth(); ++layer) {
    apply_phase(state, diagonal, params.gammas[layer]);
    apply_mixer(state, params.betas[layer]);
  }
  return state;
}

}  // namespace

Statevector qaoa_state(const IsingModel& model, const QaoaParams& params) {
  const auto diag = hc_diagonal(model);
  return evolve(model.n, diag, params);
}

double expectation(const IsingModel& model, const QaoaParams& params) {
  const auto diag = hc_diagonal(model);
  return expectation(evolve(model.n, diag, params), diag);
}

double expectation(const Statevector& state, std::span<const double> diagonal) {
  if (diagonal.size() != state.amplitudes.size()) {
    throw DomainError("diagonal length does not match the statevector");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < diagonal.size(); ++m) {
    total += std::norm(state.amplitudes[m]) * diagonal[m];
  }
  return total;
}

std::map<std::string, std::size_t> sample(const Statevector& state, std::size_t shots,
                                          std::uint64_t seed) {
  if (shots == 0) throw DomainError("shots must be positive");
  std::vector<double> cdf(state.amplitudes.size());
  double running = 0.0;
  for (std::size_t m = 0; m < cdf.size(); ++m) {
    running += std::norm(state.amplitudes[m]);
    cdf[m] = running;
  }
  std::vector<std::size_t> counts(cdf.size(), 0);
  Rng rng(seed);
  for (std::size_t shot = 0; shot < shots; ++shot) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  std::map<std::string, std::size_t> out;
  for (std::size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] > 0) out.emplace(bitstring_of_index(m, state.n), counts[m]);
  }
  return out;
}

double success_probability(const Statevector& state, std::span<const int> x) {
  if (x.size() != state.n) throw DomainError("spin vector length does not match qubit count");
  return state.probability(index_from_spins(x));
}

QaoaCircuit::QaoaCircuit(const IsingModel& model) : n_(model.n), diagonal_(hc_diagonal(model)) {}

Statevector QaoaCircuit::state(const QaoaParams& params) const {
  return evolve(n_, diagonal_, params);
}

double QaoaCircuit::expectation(const QaoaParams& params) const {
  return qmimo::expectation(evolve(n_, diagonal_, params), diagonal_);
}

}  // namespace qmimo
