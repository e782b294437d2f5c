#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qubus/phase_space.hpp"

namespace qubus {

/// Computational basis label for 1 or 2 qubits. Qubit 0 is the most
/// significant bit, so for two qubits index = 2*b0 + b1 (00, 01, 10, 11).
struct Bitstring {
  std::size_t index = 0;
  std::size_t num_qubits = 2;

  int bit(std::size_t qubit) const {
    return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1U);
  }
  /// sigma_z eigenvalue: +1 for |0>, -1 for |1>.
  int sign(std::size_t qubit) const { return bit(qubit) == 0 ? +1 : -1; }
};

/// Bus operation selected by the sigma_z eigenvalue of one qubit.
struct ConditionalBusOp {
  std::size_t target = 0;
  BusOp on_plus;   // s = +1
  BusOp on_minus;  // s = -1

  const BusOp& for_sign(int s) const { return s > 0 ? on_plus : on_minus; }

  static ConditionalBusOp unconditional(std::size_t target, const BusOp& op) {
    return {target, op, op};
  }
  static ConditionalBusOp displacement(std::size_t target, Complex beta) {
    return {target, BusOp::displacement(beta), BusOp::displacement(-beta)};
  }
  static ConditionalBusOp rotation(std::size_t target, double theta) {
    return {target, BusOp::rotation(theta), BusOp::rotation(-theta)};
  }
};

struct HybridTerm {
  Complex coeff;
  CoherentBranch bus;
  std::vector<CoherentBranch> env;  // one per completed lossy primitive
};

/// Normalized input coefficients and bus amplitude, kept for fidelity targets.
struct InputRecord {
  std::vector<Complex> coeffs;
  Complex bus_amp;
  double norm_deviation = 0.0;  // |sum |c|^2 - 1| before renormalization
};

/// Joint qubit/bus/environment state with one term per bitstring.
class HybridState {
 public:
  HybridState(std::size_t num_qubits, std::vector<HybridTerm> terms,
              std::optional<InputRecord> input = std::nullopt);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return terms_.size(); }
  const std::vector<HybridTerm>& terms() const { return terms_; }
  const HybridTerm& term(std::size_t index) const { return terms_.at(index); }
  Bitstring bitstring(std::size_t index) const { return {index, num_qubits_}; }
  const std::optional<InputRecord>& input() const { return input_; }
  std::size_t env_modes() const { return terms_.empty() ? 0 : terms_.front().env.size(); }

  double norm_squared() const;

  HybridState with_terms(std::vector<HybridTerm> terms) const {
    return HybridState(num_qubits_, std::move(terms), input_);
  }

 private:
  std::size_t num_qubits_;
  std::vector<HybridTerm> terms_;
  std::optional<InputRecord> input_;
};

/// 2^n x 2^n reduced qubit density matrix indexed by bitstring.
using DensityMatrix = Eigen::MatrixXcd;

/// Builds sum_s c_s |s>|bus_amp> with renormalized coefficients; the number
/// of coefficients (2 or 4) fixes the qubit count. Throws ZeroNormError.
HybridState init_state(std::span<const Complex> coeffs, Complex bus_amp);

HybridState apply_conditional(const HybridState& state, const ConditionalBusOp& op);

/// Multiplies each term by the diagonal entry selected by `qubit`.
/// Throws NonUnitaryError when an entry is off the unit circle by > 1e-12.
HybridState apply_local_diagonal(const HybridState& state, std::size_t qubit,
                                 const std::array<Complex, 2>& diag);

/// rho_{s,s'} = c_s conj(c_s') <bus_s'|bus_s> prod_k <env_s',k|env_s,k>.
/// With `include_env` false the environment overlaps are treated as 1.
DensityMatrix reduced_qubit_density(const HybridState& state, bool include_env = true);

/// Max |bus amplitude difference| over pairs of terms with nonzero coefficient.
double bus_disentanglement_defect(const HybridState& state);

double purity(const DensityMatrix& rho);

}  // namespace qubus
