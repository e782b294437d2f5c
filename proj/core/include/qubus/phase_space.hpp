#pragma once

// Closed-form algebra of single-mode displacements and number rotations.
//
// Every product of displacements D(b) = exp(b a^dag - conj(b) a) and rotations
// R(t) = exp(-i t a^dag a) has the normal form exp(i phase) D(disp) R(rot).
// Two facts drive everything here:
//
//   D(b1) D(b2) = exp(i Im(b1 conj(b2))) D(b1 + b2)
//   R(t) D(b) R(-t) = D(b exp(-i t))
//
// Quadrature convention: X(phi) = a^dag e^{i phi} + a e^{-i phi}, x = X(0),
// p = X(pi/2), so [x, p] = 2i and a coherent amplitude alpha sits at
// (x, p) = (2 Re alpha, 2 Im alpha). A closed displacement loop with vertices
// S_0..S_m (S_m = S_0) accumulates phase sum_k Im(conj(S_{k-1}) S_k), which is
// twice the loop area in the alpha plane, i.e. half the area in (x, p).

#include <complex>
#include <span>
#include <vector>

namespace qubus {

using Complex = std::complex<double>;

/// Conversions between coherent amplitudes and (x, p) quadrature means.
struct QuadratureConvention {
  static constexpr double kCommutator = 2.0;  // [x, p] = 2i
  static double x(Complex amp) { return 2.0 * amp.real(); }
  static double p(Complex amp) { return 2.0 * amp.imag(); }
  static Complex amplitude(double x, double p) { return {x / 2.0, p / 2.0}; }
};

/// exp(i phase) D(disp) R(rot), with the global phase kept unwrapped.
struct BusOp {
  double phase = 0.0;
  Complex disp{0.0, 0.0};
  double rot = 0.0;

  static BusOp identity() { return {}; }
  static BusOp displacement(Complex beta) { return {0.0, beta, 0.0}; }
  static BusOp rotation(double theta) { return {0.0, {0.0, 0.0}, theta}; }
  static BusOp global_phase(double phi) { return {phi, {0.0, 0.0}, 0.0}; }

  bool is_finite() const;
};

/// Normal form of `second` applied after `first`.
BusOp compose(const BusOp& first, const BusOp& second);

/// Folds a list of ops applied in order.
BusOp compose_all(std::span<const BusOp> ops);

BusOp inverse(const BusOp& op);

/// exp(i phase) |amp>, always normalized.
struct CoherentBranch {
  double phase = 0.0;
  Complex amp{0.0, 0.0};
};

CoherentBranch apply_to_coherent(const BusOp& op, const CoherentBranch& input);

/// <a|b>, phases included.
Complex coherent_overlap(const CoherentBranch& a, const CoherentBranch& b);

/// Difference of two phases reduced to (-pi, pi].
double wrap_phase(double phase);

/// Ordered coherent amplitudes visited by a branch.
struct PhaseSpacePath {
  std::vector<Complex> vertices;

  bool is_closed(double tol = 1e-9) const;
};

/// Path of a coherent branch starting at `start` under `ops` (start included).
PhaseSpacePath trace_path(Complex start, std::span<const BusOp> ops);

/// Signed shoelace area in the (x, p) plane, counterclockwise positive.
/// Throws OpenPathError when the path does not close within `tol`.
double loop_area(const PhaseSpacePath& path, double tol = 1e-9);

}  // namespace qubus
