#pragma once

#include <array>
#include <span>
#include <utility>

#include "qubus/fock.hpp"
#include "qubus/gates.hpp"
#include "qubus/hybrid_state.hpp"

namespace qubus {

/// Off-diagonal pairs (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
inline constexpr std::array<std::pair<int, int>, 6> kCoherencePairs{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct MetricsReport {
  std::array<double, 4> conditional_phases{};  // wrapped to (-pi, pi]
  double disentanglement_defect = 0.0;
  double two_qubit_fidelity = 0.0;
  double purity = 0.0;
  std::array<double, 6> coherence_magnitudes{};  // |rho_{s,s'}| over kCoherencePairs
  std::array<Complex, 6> env_coherence{};        // prod_k <env_s',k|env_s,k>
  double env_photon_budget = 0.0;                // max over bitstrings of sum |env|^2
};

/// Fidelity of the reduced two-qubit state to target . input, plus all other
/// report fields. Throws MissingInputRecord when the state lost its input.
MetricsReport gate_fidelity(const HybridState& final_state, const TwoQubitTarget& target);
MetricsReport gate_fidelity(const HybridState& final_state, const GateParams& params);
MetricsReport gate_fidelity(const fock::FockVector& final_state, const TwoQubitTarget& target);
MetricsReport gate_fidelity(const fock::FockVector& final_state, const GateParams& params);

enum class DephasingSchedule {
  kSingleDisplacement,  // one lossy D(beta sz) on qubit 0
  kFullGate,            // the four lossy displacements of U_tot
};

/// -ln |prod_k <env_11,k|env_00,k>| after the schedule with
/// beta = 2 alpha sin(theta) on every conditional displacement.
double dephasing_exponent(double eta, Complex alpha, double theta, DephasingSchedule schedule,
                          bool compensate = true);

/// Least-squares slope of ln(y) against ln(x).
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace qubus
