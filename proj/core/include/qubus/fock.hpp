#pragma once

// Truncated Fock-space backend. Independent of the closed-form algebra: every
// primitive is the matrix exponential of its truncated generator, and joint
// qubit/bus vectors are laid out bitstring-major (index = bits * N + n).

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qubus/hybrid_state.hpp"
#include "qubus/sequence.hpp"

namespace qubus::fock {

/// Smallest N >= A^2 + 8 A + 20 for a maximal branch amplitude A.
int cutoff_rule(double amplitude);

/// Photon numbers [first, last] inclusive.
struct PhotonRange {
  int first = 0;
  int last = 0;
};

/// Largest photon number n for which an input |n> (amplitude ~ sqrt(n))
/// pushed a further `excursion` still satisfies cutoff_rule at `cutoff`.
int interior_limit(int cutoff, double excursion);

struct FockMatrix {
  int cutoff = 0;
  std::size_t qubits = 0;
  Eigen::MatrixXcd data;

  Eigen::Index dimension() const { return data.rows(); }
};

struct FockInputRecord {
  std::vector<Complex> coeffs;
  Eigen::VectorXcd bus;
};

struct FockVector {
  int cutoff = 0;
  std::size_t qubits = 0;
  Eigen::VectorXcd amps;
  std::optional<FockInputRecord> input;

  std::size_t blocks() const { return std::size_t{1} << qubits; }
  auto block(std::size_t bits) { return amps.segment(static_cast<Eigen::Index>(bits) * cutoff, cutoff); }
  auto block(std::size_t bits) const {
    return amps.segment(static_cast<Eigen::Index>(bits) * cutoff, cutoff);
  }
};

Eigen::MatrixXcd annihilation(int cutoff);
Eigen::MatrixXcd number(int cutoff);

/// expm(beta a^dag - conj(beta) a). With `strict`, throws CutoffTooSmall
/// when cutoff < cutoff_rule(|beta|).
FockMatrix build_displacement(Complex beta, int cutoff, bool strict = false);

/// diag(exp(-i theta n)).
FockMatrix build_rotation(double theta, int cutoff);

/// expm(-i t [eps (a^dag e^{i phi} + a e^{-i phi}) + chi_eff n]).
FockMatrix build_drive(double eps, double chi_eff, double t, double drive_phase, int cutoff);

/// exp(i phase) D(disp) R(rot), built from the three matrices above.
FockMatrix build_bus_op(const BusOp& op, int cutoff);

/// Bus matrix a primitive applies on the branch with sigma_z eigenvalue `sign`.
Eigen::MatrixXcd branch_matrix(const PrimitiveOp& op, int sign, int cutoff);

/// Coefficients e^{-|a|^2/2} a^n / sqrt(n!) for n < cutoff (unnormalized by truncation).
Eigen::VectorXcd coherent_state(Complex amp, int cutoff);

/// sum_s c_s |s> (x) bus, recording the input for fidelity targets.
FockVector product_state(std::span<const Complex> coeffs, const Eigen::VectorXcd& bus);

/// Fock image of a lossless exact-backend state (bus branches with phases).
FockVector from_hybrid(const HybridState& state, int cutoff);

struct EvolveOptions {
  bool strict = false;
  int guard = 8;                    // top photon levels counted as edge
  double leakage_tolerance = 1e-9;  // strict-mode limit
};

struct EvolveResult {
  FockVector state;
  double norm_defect = 0.0;      // |1 - |psi|^2 / |psi_in|^2|
  double edge_population = 0.0;  // max over steps of weight in the guard band
  double leakage() const { return std::max(norm_defect, edge_population); }
};

/// Applies each primitive as a block-diagonal joint matrix. Loss annotations
/// are rejected (use the two-mode model below). Strict mode throws
/// CutoffTooSmall when leakage exceeds the tolerance.
EvolveResult evolve(const GateSequence& seq, const FockVector& input,
                    const EvolveOptions& options = {});

/// Joint (2^q N) matrix of the whole sequence.
FockMatrix compose_sequence(const GateSequence& seq, std::size_t qubits, int cutoff);

/// diag over bitstrings of `phases` tensored with the bus identity.
FockMatrix qubit_diagonal(std::span<const Complex> phases, int cutoff);

/// Max |entry| of composed(seq) - target over rows and columns whose photon
/// index lies in `interior`. Throws ShapeMismatch on cutoff/qubit mismatch.
double operator_distance(const GateSequence& seq, const FockMatrix& target, PhotonRange interior);

/// Arbitrary single-qubit unitary on `qubit` (mixes bus blocks).
FockVector apply_local(const FockVector& state, std::size_t qubit,
                       const Eigen::Matrix2cd& unitary);

/// |<a|b>|^2.
double state_fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Partial trace over the bus: rho_{s,s'} = <block_s'|block_s>.
DensityMatrix reduced_density(const FockVector& state);

/// <a> within one bitstring block, normalized by the block weight.
Complex mean_amplitude(const FockVector& state, std::size_t bits);

/// Reduced qubit density after one lossy conditional displacement, modeled
/// as bus (x) ancilla (cutoff each) with the displacement conjugated by a
/// beam splitter of reflectivity eta: B (D(beta s) (x) 1) B^dag. `input`
/// must be lossless; its bus branches become the system mode.
DensityMatrix two_mode_lossy_density(const HybridState& input, Complex beta, std::size_t qubit,
                                     double eta, int cutoff);

}  // namespace qubus::fock
