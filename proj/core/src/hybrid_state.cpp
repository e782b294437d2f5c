#include "qubus/hybrid_state.hpp"

#include <cmath>
#include <string>

#include "qubus/errors.hpp"

namespace qubus {

HybridState::HybridState(std::size_t num_qubits, std::vector<HybridTerm> terms,
                         std::optional<InputRecord> input)
    : num_qubits_(num_qubits), terms_(std::move(terms)), input_(std::move(input)) {
  if (num_qubits_ < 1 || num_qubits_ > 2) {
    throw IndexError("HybridState supports 1 or 2 qubits, got " + std::to_string(num_qubits_));
  }
  if (terms_.size() != (std::size_t{1} << num_qubits_)) {
    throw ShapeMismatch("HybridState needs one term per bitstring");
  }
  const std::size_t env = terms_.front().env.size();
  for (const auto& t : terms_) {
    if (t.env.size() != env) throw ShapeMismatch("HybridState terms carry unequal env lists");
  }
}

double HybridState::norm_squared() const {
  double n = 0.0;
  for (const auto& t : terms_) n += std::norm(t.coeff);
  return n;
}

HybridState init_state(std::span<const Complex> coeffs, Complex bus_amp) {
  std::size_t qubits = 0;
  if (coeffs.size() == 2) {
    qubits = 1;
  } else if (coeffs.size() == 4) {
    qubits = 2;
  } else {
    throw ShapeMismatch("init_state expects 2 or 4 coefficients, got " +
                        std::to_string(coeffs.size()));
  }
  double norm2 = 0.0;
  for (const auto& c : coeffs) norm2 += std::norm(c);
  if (!(norm2 > 1e-300) || !std::isfinite(norm2)) {
    throw ZeroNormError("init_state: coefficients have zero norm");
  }
  const double scale = 1.0 / std::sqrt(norm2);

  InputRecord record;
  record.bus_amp = bus_amp;
  record.norm_deviation = std::abs(norm2 - 1.0);
  std::vector<HybridTerm> terms;
  terms.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    record.coeffs.push_back(c * scale);
    terms.push_back({c * scale, CoherentBranch{0.0, bus_amp}, {}});
  }
  return HybridState(qubits, std::move(terms), std::move(record));
}

HybridState apply_conditional(const HybridState& state, const ConditionalBusOp& op) {
  if (op.target >= state.num_qubits()) {
    throw IndexError("apply_conditional: target qubit " + std::to_string(op.target) +
                     " out of range");
  }
  auto terms = state.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const int s = state.bitstring(i).sign(op.target);
    terms[i].bus = apply_to_coherent(op.for_sign(s), terms[i].bus);
  }
  return state.with_terms(std::move(terms));
}

HybridState apply_local_diagonal(const HybridState& state, std::size_t qubit,
                                 const std::array<Complex, 2>& diag) {
  if (qubit >= state.num_qubits()) {
    throw IndexError("apply_local_diagonal: qubit " + std::to_string(qubit) + " out of range");
  }
  for (const auto& u : diag) {
    if (std::abs(std::abs(u) - 1.0) > 1e-12) {
      throw NonUnitaryError("apply_local_diagonal: entry is not unit modulus");
    }
  }
  auto terms = state.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i].coeff *= diag[static_cast<std::size_t>(state.bitstring(i).bit(qubit))];
  }
  return state.with_terms(std::move(terms));
}

DensityMatrix reduced_qubit_density(const HybridState& state, bool include_env) {
  const auto n = static_cast<Eigen::Index>(state.dimension());
  DensityMatrix rho(n, n);
  const auto& terms = state.terms();
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& tr = terms[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c <= r; ++c) {
      const auto& tc = terms[static_cast<std::size_t>(c)];
      Complex value = tr.coeff * std::conj(tc.coeff) * coherent_overlap(tc.bus, tr.bus);
      if (include_env) {
        for (std::size_t k = 0; k < tr.env.size(); ++k) {
          value *= coherent_overlap(tc.env[k], tr.env[k]);
        }
      }
      rho(r, c) = value;
      rho(c, r) = std::conj(value);
    }
    rho(r, r) = Complex(rho(r, r).real(), 0.0);
  }
  return rho;
}

double bus_disentanglement_defect(const HybridState& state) {
  double worst = 0.0;
  const auto& terms = state.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coeff == Complex{}) continue;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (terms[j].coeff == Complex{}) continue;
      worst = std::max(worst, std::abs(terms[i].bus.amp - terms[j].bus.amp));
    }
  }
  return worst;
}

double purity(const DensityMatrix& rho) { return (rho * rho).trace().real(); }

}  // namespace qubus
