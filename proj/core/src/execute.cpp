#include "qubus/execute.hpp"

#include <algorithm>
#include <cmath>

#include "qubus/drive.hpp"
#include "qubus/loss.hpp"

namespace qubus {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kDriveSamples = 64;

double transmitted_factor(const Primitive& p) {
  return p.loss ? std::sqrt(1.0 - *p.loss * *p.loss) : 1.0;
}

}  // namespace

ConditionalBusOp conditional_op(const PrimitiveOp& op) {
  return std::visit(
      Overloaded{
          [](const UncondDisp& d) {
            return ConditionalBusOp::unconditional(0, BusOp::displacement(d.beta));
          },
          [](const CondRot& r) { return ConditionalBusOp::rotation(r.qubit, r.theta); },
          [](const CondDisp& d) { return ConditionalBusOp::displacement(d.qubit, d.beta); },
          [](const DrivePulse& d) {
            const double chi = d.sign * d.chi;
            return ConditionalBusOp{d.qubit, drive_evolution(d.eps, chi, d.duration, d.drive_phase),
                                    drive_evolution(d.eps, -chi, d.duration, d.drive_phase)};
          }},
      op);
}

HybridState run_exact(const GateSequence& seq, const HybridState& state) {
  seq.validate(state.num_qubits());
  HybridState current = state;
  for (const auto& p : seq.primitives()) {
    if (p.loss) {
      const auto& d = std::get<CondDisp>(p.op);
      current = apply_lossy_cond_disp(current, d.beta, d.qubit, *p.loss);
    } else {
      current = apply_conditional(current, conditional_op(p.op));
    }
  }
  return current;
}

BusOp branch_composition(const GateSequence& seq, const Bitstring& bits) {
  BusOp acc;
  for (const auto& p : seq.primitives()) {
    const auto cond = conditional_op(p.op);
    BusOp op = cond.for_sign(std::holds_alternative<UncondDisp>(p.op) ? +1 : bits.sign(cond.target));
    op.disp *= transmitted_factor(p);
    acc = compose(acc, op);
  }
  return acc;
}

std::vector<BusOp> branch_compositions(const GateSequence& seq, std::size_t num_qubits) {
  std::vector<BusOp> out;
  const std::size_t dim = std::size_t{1} << num_qubits;
  out.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) out.push_back(branch_composition(seq, {i, num_qubits}));
  return out;
}

double max_excursion(const GateSequence& seq, const HybridState& state) {
  double worst = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const Bitstring bits = state.bitstring(i);
    CoherentBranch branch = state.term(i).bus;
    worst = std::max(worst, std::abs(branch.amp));
    for (const auto& p : seq.primitives()) {
      if (const auto* pulse = std::get_if<DrivePulse>(&p.op)) {
        const double chi = pulse->sign * pulse->chi * bits.sign(pulse->qubit);
        for (int k = 1; k < kDriveSamples; ++k) {
          const double tau = pulse->duration * k / kDriveSamples;
          const auto partial = apply_to_coherent(
              drive_evolution(pulse->eps, chi, tau, pulse->drive_phase), branch);
          worst = std::max(worst, std::abs(partial.amp));
        }
      }
      const auto cond = conditional_op(p.op);
      BusOp op =
          cond.for_sign(std::holds_alternative<UncondDisp>(p.op) ? +1 : bits.sign(cond.target));
      op.disp *= transmitted_factor(p);
      branch = apply_to_coherent(op, branch);
      worst = std::max(worst, std::abs(branch.amp));
    }
  }
  return worst;
}

}  // namespace qubus
