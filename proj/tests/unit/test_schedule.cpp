#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qubus/errors.hpp"
#include "qubus/execute.hpp"
#include "qubus/fock.hpp"
#include "qubus/gates.hpp"
#include "qubus/metrics.hpp"
#include "qubus/schedule.hpp"

using namespace qubus;
using oracle::phase_gap;

namespace {

void expect_schedule_valid(const EightPulseSchedule& s, double target, double eps_max) {
  ASSERT_EQ(s.sequence.size(), 8U);
  for (const auto& p : s.sequence.primitives()) {
    const auto* pulse = std::get_if<DrivePulse>(&p.op);
    ASSERT_NE(pulse, nullptr);
    EXPECT_LE(std::abs(pulse->eps), eps_max);
    EXPECT_GE(pulse->duration, 0.0);
  }
  const std::array<Complex, 4> uniform{0.5, 0.5, 0.5, 0.5};
  const auto out = run_exact(s.sequence, init_state(uniform, 0.0));
  EXPECT_LE(bus_disentanglement_defect(out), 1e-10);
  for (std::size_t b = 0; b < 4; ++b) {
    const Bitstring bits{b, 2};
    const BusOp op = branch_composition(s.sequence, bits);
    EXPECT_LE(std::abs(op.disp), 1e-10);
    EXPECT_NEAR(op.rot, 0.0, 1e-12);
    EXPECT_NEAR(phase_gap(op.phase, target * bits.sign(0) * bits.sign(1)), 0.0, 1e-10);
  }
}

}  // namespace

TEST(Schedule, ZeroTargetIsIdle) {
  const auto s = solve_eight_op_schedule(0.0, 1.0, 10.0);
  ASSERT_EQ(s.sequence.size(), 8U);
  for (const auto& p : s.sequence.primitives()) {
    EXPECT_EQ(std::get<DrivePulse>(p.op).eps, 0.0);
    EXPECT_EQ(std::get<DrivePulse>(p.op).duration, 0.0);
  }
  expect_schedule_valid(s, 0.0, 10.0);
}

TEST(Schedule, QuarterPhaseGate) {
  const auto s = solve_eight_op_schedule(std::numbers::pi / 4.0, 1.0, 10.0);
  expect_schedule_valid(s, std::numbers::pi / 4.0, 10.0);
  EXPECT_LE(s.residual, 1e-11);
  // Alternating qubits, two pulses per qubit pair with opposite coupling sign.
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& p = std::get<DrivePulse>(s.sequence[k].op);
    EXPECT_EQ(p.qubit, (k / 2) % 2);
    EXPECT_EQ(p.sign, k % 2 == 0 ? 1 : -1);
  }
}

TEST(Schedule, OtherTargetsAndCouplings) {
  for (double chi : {1.0, -1.0, 0.5, 3.0}) {
    for (double target : {std::numbers::pi / 4.0, -std::numbers::pi / 4.0, 0.1, 1.2}) {
      const auto s = solve_eight_op_schedule(target, chi, 50.0);
      expect_schedule_valid(s, target, 50.0);
    }
  }
}

TEST(Schedule, FockVerifiedGate) {
  const auto s = solve_eight_op_schedule(std::numbers::pi / 4.0, 1.0, 10.0);
  std::mt19937_64 rng(901);
  const auto in = init_state(oracle::random_state(rng, 4), {0.3, -0.2});
  const int n = fock::cutoff_rule(max_excursion(s.sequence, in));
  const auto out = fock::evolve(s.sequence, fock::from_hybrid(in, n));
  const auto r = gate_fidelity(out.state, phase_target(std::numbers::pi / 4.0));
  EXPECT_GE(r.two_qubit_fidelity, 1.0 - 1e-9);
  EXPECT_LE(out.leakage(), 1e-9);
}

TEST(Schedule, Errors) {
  EXPECT_THROW(solve_eight_op_schedule(std::numbers::pi / 4.0, 0.0, 10.0), DegenerateCoupling);
  EXPECT_THROW(solve_eight_op_schedule(std::numbers::pi / 4.0, 1.0, 0.0), std::invalid_argument);
  try {
    solve_eight_op_schedule(std::numbers::pi / 4.0, 1.0, 1e-3);
    FAIL() << "expected NoSolutionFound";
  } catch (const NoSolutionFound& e) {
    EXPECT_GT(e.best_residual(), 1e-11);
  }
}

TEST(Schedule, ConditionalPhaseOfPhases) {
  EXPECT_DOUBLE_EQ(conditional_phase({0.5, -0.5, -0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(conditional_phase({1.0, 1.0, 1.0, 1.0}), 0.0);
}

TEST(Schedule, JacobianMatchesFiniteDifferences) {
  const auto s = solve_eight_op_schedule(std::numbers::pi / 4.0, 1.0, 10.0);
  const auto grad = conditional_phase_gradient(s.sequence);
  ASSERT_EQ(grad.size(), 8U);
  const double h = 1e-6;
  const auto phase_of = [](const GateSequence& seq) {
    const auto jac = drive_jacobian(seq);
    return conditional_phase(jac.phases);
  };
  for (std::size_t k = 0; k < 8; ++k) {
    std::vector<Primitive> plus = s.sequence.primitives(), minus = s.sequence.primitives();
    std::get<DrivePulse>(plus[k].op).eps += h;
    std::get<DrivePulse>(minus[k].op).eps -= h;
    const double fd = (phase_of(GateSequence(plus)) - phase_of(GateSequence(minus))) / (2.0 * h);
    EXPECT_NEAR(fd, grad[k], 1e-4 * std::max(std::abs(grad[k]), 1e-3)) << "pulse " << k;
  }
}

TEST(Schedule, FullJacobianMatchesFiniteDifferences) {
  // Random drive-only sequence; every entry of the analytic Jacobian.
  std::mt19937_64 rng(902);
  GateSequence seq;
  for (int k = 0; k < 5; ++k) {
    seq.add(DrivePulse{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -3, 3), k % 2 ? 1 : -1,
                       oracle::uniform(rng, 0.1, 2.0), oracle::uniform(rng, 0.5, 1.5),
                       static_cast<std::size_t>(rng() % 2)});
  }
  const auto jac = drive_jacobian(seq);
  const double h = 1e-6;
  for (Eigen::Index col = 0; col < 10; ++col) {
    std::vector<Primitive> plus = seq.primitives(), minus = seq.primitives();
    auto& pp = std::get<DrivePulse>(plus[static_cast<std::size_t>(col % 5)].op);
    auto& pm = std::get<DrivePulse>(minus[static_cast<std::size_t>(col % 5)].op);
    (col < 5 ? pp.eps : pp.duration) += h;
    (col < 5 ? pm.eps : pm.duration) -= h;
    const auto jp = drive_jacobian(GateSequence(plus));
    const auto jm = drive_jacobian(GateSequence(minus));
    for (std::size_t b = 0; b < 4; ++b) {
      const auto r = static_cast<Eigen::Index>(4 * b);
      const Complex dd = (jp.disps[b] - jm.disps[b]) / (2.0 * h);
      EXPECT_NEAR(jac.jacobian(r, col), dd.real(), 1e-6);
      EXPECT_NEAR(jac.jacobian(r + 1, col), dd.imag(), 1e-6);
      EXPECT_NEAR(jac.jacobian(r + 2, col), (jp.phases[b] - jm.phases[b]) / (2.0 * h), 1e-6);
      EXPECT_NEAR(jac.jacobian(r + 3, col), (jp.rots[b] - jm.rots[b]) / (2.0 * h), 1e-6);
    }
  }
}

TEST(Schedule, ReentrantAndDeterministic) {
  const auto a = solve_eight_op_schedule(0.7, 1.0, 10.0);
  const auto b = solve_eight_op_schedule(0.7, 1.0, 10.0);
  EXPECT_EQ(a.sequence, b.sequence);
}
