#include "qubus/loss.hpp"

#include <cmath>
#include <string>

#include "qubus/errors.hpp"

namespace qubus {

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidEta("eta must lie in [0, 1), got " + std::to_string(eta));
  }
}

double LossModel::transmission() const {
  check_eta(eta);
  return std::sqrt(1.0 - eta * eta);
}

HybridState apply_lossy_cond_disp(const HybridState& state, Complex beta, std::size_t qubit,
                                  double eta) {
  check_eta(eta);
  if (qubit >= state.num_qubits()) {
    throw IndexError("apply_lossy_cond_disp: qubit " + std::to_string(qubit) + " out of range");
  }
  const double transmitted = std::sqrt(1.0 - eta * eta);
  auto terms = state.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double s = state.bitstring(i).sign(qubit);
    terms[i].bus = apply_to_coherent(BusOp::displacement(transmitted * beta * s), terms[i].bus);
    // The environment mode starts in vacuum, so its branch carries no phase.
    terms[i].env.push_back(
        apply_to_coherent(BusOp::displacement(eta * beta * s), CoherentBranch{}));
  }
  return state.with_terms(std::move(terms));
}

Complex compensate_amplitude(Complex beta_target, double eta) {
  check_eta(eta);
  return beta_target / std::sqrt(1.0 - eta * eta);
}

}  // namespace qubus
