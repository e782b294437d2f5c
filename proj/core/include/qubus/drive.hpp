#pragma once

#include <cstddef>
#include <string>

#include "qubus/hybrid_state.hpp"
#include "qubus/phase_space.hpp"

namespace qubus {

/// Below this |chi_eff * t| the drive normal form switches to its series.
inline constexpr double kDriveSeriesThreshold = 1e-6;

/// Exact normal form of exp(-i t [eps X(drive_phase) + chi_eff a^dag a]).
///
/// With g = eps / chi_eff and w = chi_eff t (drive_phase = 0):
///   rot = w,  disp = g (e^{-i w} - 1),  phase = t eps^2 / chi_eff - g^2 sin w.
/// A nonzero drive phase rotates the displacement by e^{i drive_phase}.
BusOp drive_evolution(double eps, double chi_eff, double t, double drive_phase = 0.0);

/// drive_evolution together with its partial derivatives in eps and t,
/// each stored as a BusOp of field-wise derivatives.
struct DriveTangent {
  BusOp value;
  BusOp d_eps;
  BusOp d_t;
};
DriveTangent drive_evolution_tangent(double eps, double chi_eff, double t,
                                     double drive_phase = 0.0);

/// U(eps, -chi sigma_z) after U(eps, +chi sigma_z), each for time t, on
/// `qubit`. Per branch s the result is the pure displacement
/// (2 eps / (s chi)) (1 - e^{i s chi t}). Throws DegenerateCoupling for chi = 0.
ConditionalBusOp drive_composite(double eps, double chi, double t, std::size_t qubit = 0,
                                 double drive_phase = 0.0);

/// Split of the composite displacement into u + c s.
struct CompositeComponents {
  Complex conditional;    // c = (4 eps / chi) sin^2(chi t / 2)
  Complex unconditional;  // u = (-4 i eps / chi) sin(chi t / 2) cos(chi t / 2)
};
CompositeComponents composite_components(double eps, double chi, double t);

/// Compares the exact composite with the printed small-(chi t) form
/// D(2 i eps t sigma_z). Informational only.
struct SmallCouplingReport {
  double eps = 0.0;
  double chi = 0.0;
  double t = 0.0;
  Complex exact_conditional;
  Complex exact_unconditional;
  Complex naive_conditional;  // 2 i eps t
  Complex leading_conditional;  // eps chi t^2
  Complex leading_unconditional;  // -2 i eps t
  double conditional_mismatch = 0.0;  // |exact_conditional - naive_conditional|

  std::string describe() const;
};
SmallCouplingReport small_coupling_report(double eps, double chi, double t);

}  // namespace qubus
