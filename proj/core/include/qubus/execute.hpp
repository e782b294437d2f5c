#pragma once

#include <cstddef>
#include <vector>

#include "qubus/hybrid_state.hpp"
#include "qubus/sequence.hpp"

namespace qubus {

/// Bus action of one primitive per sigma_z eigenvalue of its qubit.
/// Loss annotations are ignored here (full displacement).
ConditionalBusOp conditional_op(const PrimitiveOp& op);

/// Exact backend: applies every primitive, routing lossy CondDisp through
/// apply_lossy_cond_disp.
HybridState run_exact(const GateSequence& seq, const HybridState& state);

/// Normal form of the whole sequence on one bitstring branch. Lossy
/// displacements contribute their transmitted part.
BusOp branch_composition(const GateSequence& seq, const Bitstring& bits);

/// branch_composition for every bitstring of `num_qubits` qubits.
std::vector<BusOp> branch_compositions(const GateSequence& seq, std::size_t num_qubits);

/// Largest coherent amplitude reached by any branch during the sequence,
/// including points along drive-pulse trajectories.
double max_excursion(const GateSequence& seq, const HybridState& state);

}  // namespace qubus
