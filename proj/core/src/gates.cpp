#include "qubus/gates.hpp"

#include <cmath>
#include <numbers>

#include "qubus/errors.hpp"
#include "qubus/loss.hpp"

namespace qubus {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

double GateParams::d() const { return 2.0 * std::abs(alpha) * std::sin(theta); }

double GateParams::target_phase() const { return 2.0 * std::real(std::conj(beta1) * beta2); }

std::array<Complex, 2> TwoQubitTarget::cz_local_correction() {
  return {std::polar(1.0, -std::numbers::pi / 4.0), std::polar(1.0, std::numbers::pi / 4.0)};
}

Complex TwoQubitTarget::cz_global_correction() { return std::polar(1.0, std::numbers::pi / 4.0); }

std::array<Complex, 4> TwoQubitTarget::corrected() const {
  const auto local = cz_local_correction();
  std::array<Complex, 4> out{};
  for (std::size_t b = 0; b < 4; ++b) {
    out[b] = cz_global_correction() * local[b >> 1] * local[b & 1] * phases[b];
  }
  return out;
}

TwoQubitTarget phase_target(double conditional_phase) {
  TwoQubitTarget t;
  t.conditional_phase = conditional_phase;
  for (std::size_t b = 0; b < 4; ++b) {
    const Bitstring bits{b, 2};
    t.phases[b] = std::polar(1.0, conditional_phase * bits.sign(0) * bits.sign(1));
  }
  return t;
}

TwoQubitTarget utot_closed_form(Complex beta1, Complex beta2) {
  return phase_target(2.0 * std::real(std::conj(beta1) * beta2));
}

GateSequence build_utot(Complex beta1, Complex beta2, std::optional<double> eta) {
  if (eta) check_eta(*eta);
  GateSequence seq;
  seq.add(CondDisp{-beta1, 0}, eta);
  seq.add(CondDisp{-kI * beta2, 1}, eta);
  seq.add(CondDisp{beta1, 0}, eta);
  seq.add(CondDisp{kI * beta2, 1}, eta);
  return seq;
}

GateSequence build_sim_cond_disp(Complex alpha, double theta, std::size_t qubit) {
  GateSequence seq;
  const Complex outer = alpha * std::cos(theta);
  seq.add(UncondDisp{outer});
  seq.add(CondRot{-theta, qubit});
  seq.add(UncondDisp{-2.0 * alpha});
  seq.add(CondRot{theta, qubit});
  seq.add(UncondDisp{outer});
  return seq;
}

Complex alpha_for(Complex beta, double theta) {
  const double s = std::sin(theta);
  if (beta == Complex{}) return {};
  if (s == 0.0 || !std::isfinite(s)) {
    throw InfeasibleParams("sin(theta) = 0 cannot realize a nonzero conditional displacement");
  }
  return beta / (2.0 * kI * s);
}

TwoQubitGate build_two_qubit_gate_for(Complex beta1, Complex beta2, double theta1, double theta2) {
  TwoQubitGate gate;
  gate.beta1 = beta1;
  gate.beta2 = beta2;
  gate.effective = {-beta1, -kI * beta2, beta1, kI * beta2};
  const std::array<double, 4> thetas{theta1, theta2, theta1, theta2};
  for (std::size_t k = 0; k < 4; ++k) {
    gate.alphas[k] = alpha_for(gate.effective[k], thetas[k]);
    gate.sequence.append(build_sim_cond_disp(gate.alphas[k], thetas[k], k % 2));
  }
  return gate;
}

TwoQubitGate build_two_qubit_gate(double alpha1, double theta1, double alpha2, double theta2) {
  return build_two_qubit_gate_for(2.0 * alpha1 * std::sin(theta1),
                                  2.0 * alpha2 * std::sin(theta2), theta1, theta2);
}

}  // namespace qubus
