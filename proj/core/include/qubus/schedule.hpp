#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qubus/sequence.hpp"

namespace qubus {

/// Result of solve_eight_op_schedule.
///
/// Layout: four composite pairs acting alternately on qubit 0 and qubit 1.
/// Pair k drives with quadrature phase 0 (qubit 0) or pi/2 (qubit 1) and is
/// U(eps_a, +chi sz) for t_k followed by U(eps_b, -chi sz) for t_k, so every
/// pair returns the rotation to zero.
struct EightPulseSchedule {
  GateSequence sequence;
  double target_phase = 0.0;
  double chi = 0.0;
  int iterations = 0;
  double residual = 0.0;  // max-abs residual (loop closure and phases)
};

struct SolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-13;
};

/// Damped least-squares (Levenberg-Marquardt) root find for an eight-pulse
/// drive schedule realizing exp(i target_phase sz1 sz2) with closed loops,
/// using the analytic Jacobian of the exact per-pulse normal forms. The seed
/// is deterministic. Throws DegenerateCoupling for chi = 0 and
/// NoSolutionFound when the residual stays above tolerance or |eps| > eps_max.
EightPulseSchedule solve_eight_op_schedule(double target_phase, double chi, double eps_max,
                                           const SolverOptions& options = {});

/// (phi_00 - phi_01 - phi_10 + phi_11) / 4 from per-bitstring phases.
double conditional_phase(const std::array<double, 4>& phases);

/// Per-bitstring normal forms of a drive-only sequence and their Jacobian
/// with respect to every pulse's eps (columns 0..P-1) and duration
/// (columns P..2P-1). Rows per bitstring: Re disp, Im disp, phase, rot.
struct DriveJacobian {
  std::array<double, 4> phases{};
  std::array<Complex, 4> disps{};
  std::array<double, 4> rots{};
  Eigen::MatrixXd jacobian;  // 16 x 2P
};
DriveJacobian drive_jacobian(const GateSequence& drive_only);

/// d(conditional phase) / d(eps_k) for every pulse, from drive_jacobian.
std::vector<double> conditional_phase_gradient(const GateSequence& drive_only);

}  // namespace qubus
