#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "qubus/hybrid_state.hpp"
#include "qubus/sequence.hpp"

namespace qubus {

/// Parameters of one gate scenario. `d` is always recomputed from alpha, theta.
struct GateParams {
  Complex beta1{0.0, 0.0};
  Complex beta2{0.0, 0.0};
  Complex alpha{0.0, 0.0};
  double theta = 0.0;
  double eps = 0.0;
  double chi = 0.0;
  double t = 0.0;

  double d() const;
  /// Conditional phase 2 Re(conj(beta1) beta2).
  double target_phase() const;
};

/// Diagonal two-qubit gate target plus its controlled-Z equivalent.
struct TwoQubitTarget {
  /// exp(i phase s1 s2) per bitstring 00, 01, 10, 11.
  std::array<Complex, 4> phases;
  double conditional_phase = 0.0;

  /// Single-qubit diagonal correction exp(-i pi/4 sigma_z) and global phase
  /// exp(i pi/4) that take `phases` to diag(1, 1, 1, -1) when the
  /// conditional phase is pi/4.
  static std::array<Complex, 2> cz_local_correction();
  static Complex cz_global_correction();

  /// phases with both corrections applied (diag(1,1,1,-1) at pi/4).
  std::array<Complex, 4> corrected() const;
};

/// U_tot as four conditional displacements, first applied first:
/// D(-beta1 sz1), D(-i beta2 sz2), D(beta1 sz1), D(i beta2 sz2).
/// Qubit 0 carries beta1, qubit 1 carries beta2.
GateSequence build_utot(Complex beta1, Complex beta2, std::optional<double> eta = std::nullopt);

TwoQubitTarget utot_closed_form(Complex beta1, Complex beta2);
TwoQubitTarget phase_target(double conditional_phase);

/// Exact simulation of D(2 i alpha sin(theta) sz) from unconditional
/// displacements and conditional rotations, first applied first:
/// D(alpha cos theta), R(-theta sz), D(-2 alpha), R(+theta sz), D(alpha cos theta).
GateSequence build_sim_cond_disp(Complex alpha, double theta, std::size_t qubit);

/// Displacement amplitude alpha whose simulated conditional displacement is
/// `beta`: alpha = beta / (2 i sin theta). Throws InfeasibleParams when
/// sin theta = 0 and beta != 0.
Complex alpha_for(Complex beta, double theta);

struct TwoQubitGate {
  GateSequence sequence;
  std::array<Complex, 4> effective;  // realized conditional displacements per slot
  std::array<Complex, 4> alphas;     // displacement amplitude per slot
  Complex beta1;
  Complex beta2;
};

/// Full gate from conditional rotations and unconditional displacements
/// only (4 x 5 primitives). beta1 = 2 alpha1 sin theta1 (real axis) and
/// beta2 = 2 alpha2 sin theta2; slot k uses alpha_k = slot_k / (2 i sin theta).
TwoQubitGate build_two_qubit_gate(double alpha1, double theta1, double alpha2, double theta2);

/// Same gate specified by its target displacements.
TwoQubitGate build_two_qubit_gate_for(Complex beta1, Complex beta2, double theta1, double theta2);

}  // namespace qubus
