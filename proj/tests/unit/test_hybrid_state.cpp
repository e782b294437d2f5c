#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qubus/errors.hpp"
#include "qubus/execute.hpp"
#include "qubus/gates.hpp"
#include "qubus/hybrid_state.hpp"

using namespace qubus;
using oracle::phase_gap;

namespace {

constexpr Complex kI{0.0, 1.0};
const double kB = std::sqrt(std::numbers::pi / 8.0);

HybridState random_state(std::mt19937_64& rng, Complex bus) {
  const auto c = oracle::random_state(rng, 4);
  return init_state(c, bus);
}

// rho from explicit Fock vectors of every branch.
Eigen::MatrixXcd fock_density(const HybridState& s, int n) {
  std::vector<Eigen::VectorXcd> blocks;
  for (const auto& t : s.terms()) {
    blocks.push_back(t.coeff * std::polar(1.0, t.bus.phase) * oracle::coherent(t.bus.amp, n));
  }
  const auto d = static_cast<Eigen::Index>(blocks.size());
  Eigen::MatrixXcd rho(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) rho(r, c) = blocks[c].dot(blocks[r]);
  }
  return rho;
}

void expect_valid_density(const DensityMatrix& rho) {
  EXPECT_LT((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

}  // namespace

TEST(Bitstring, MostSignificantQubitFirst) {
  const Bitstring b{2, 2};  // |10>
  EXPECT_EQ(b.bit(0), 1);
  EXPECT_EQ(b.bit(1), 0);
  EXPECT_EQ(b.sign(0), -1);
  EXPECT_EQ(b.sign(1), +1);
  EXPECT_EQ((Bitstring{1, 1}).sign(0), -1);
}

TEST(InitState, BasisState) {
  const std::array<Complex, 4> c{1.0, 0.0, 0.0, 0.0};
  const auto s = init_state(c, 0.0);
  EXPECT_EQ(s.num_qubits(), 2U);
  EXPECT_EQ(s.term(0).coeff, Complex(1.0));
  for (const auto& t : s.terms()) {
    EXPECT_EQ(t.bus.amp, Complex(0.0));
    EXPECT_TRUE(t.env.empty());
  }
}

TEST(InitState, UniformSharesBus) {
  const std::array<Complex, 4> c{0.5, 0.5, 0.5, 0.5};
  const auto s = init_state(c, 2.0);
  for (const auto& t : s.terms()) {
    EXPECT_DOUBLE_EQ(t.coeff.real(), 0.5);
    EXPECT_EQ(t.bus.amp, Complex(2.0));
  }
  EXPECT_EQ(s.input()->norm_deviation, 0.0);
}

TEST(InitState, Renormalizes) {
  const std::array<Complex, 4> c{1.0, 1.0, 0.0, 0.0};
  const auto s = init_state(c, 0.0);
  EXPECT_NEAR(s.term(0).coeff.real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.term(1).coeff.real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s.term(2).coeff, Complex(0.0));
  EXPECT_NEAR(s.input()->norm_deviation, 1.0, 1e-15);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
}

TEST(InitState, Errors) {
  const std::array<Complex, 4> zero{};
  EXPECT_THROW(init_state(zero, 0.0), ZeroNormError);
  const std::array<Complex, 3> three{1.0, 0.0, 0.0};
  EXPECT_THROW(init_state(three, 0.0), ShapeMismatch);
}

TEST(ApplyConditional, IdentityLeavesStateUnchanged) {
  std::mt19937_64 rng(201);
  const auto s = random_state(rng, {0.3, 0.4});
  const auto out = apply_conditional(s, ConditionalBusOp{1, BusOp{}, BusOp{}});
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(out.term(i).coeff, s.term(i).coeff);
    EXPECT_EQ(out.term(i).bus.amp, s.term(i).bus.amp);
    EXPECT_EQ(out.term(i).bus.phase, s.term(i).bus.phase);
  }
}

TEST(ApplyConditional, SplitsSingleQubitBranches) {
  const std::array<Complex, 2> plus{1.0, 1.0};
  const Complex beta{0.4, -0.2};
  const auto out = apply_conditional(init_state(plus, 0.0), ConditionalBusOp::displacement(0, beta));
  EXPECT_EQ(out.term(0).bus.amp, beta);
  EXPECT_EQ(out.term(1).bus.amp, -beta);
  EXPECT_EQ(out.term(0).coeff, out.term(1).coeff);
}

TEST(ApplyConditional, BadTargetThrows) {
  const std::array<Complex, 2> plus{1.0, 1.0};
  EXPECT_THROW(apply_conditional(init_state(plus, 0.0), ConditionalBusOp::rotation(1, 0.1)),
               IndexError);
}

TEST(ApplyConditional, FullGateAgainstBruteForceFock) {
  const int n = 128;
  const std::array<Complex, 4> uniform{0.5, 0.5, 0.5, 0.5};
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 3; ++trial) {
    const Complex alpha0 = oracle::random_complex(rng, 2.0);
    const Complex b1 = oracle::random_complex(rng, 1.0);
    const Complex b2 = oracle::random_complex(rng, 1.0);
    const auto out = run_exact(build_utot(b1, b2), init_state(uniform, alpha0));

    for (std::size_t i = 0; i < 4; ++i) {
      const Bitstring bits{i, 2};
      const int s1 = bits.sign(0), s2 = bits.sign(1);
      const double want = 2.0 * std::real(std::conj(b1) * b2) * s1 * s2;
      EXPECT_NEAR(std::abs(out.term(i).bus.amp - alpha0), 0.0, 1e-12);
      EXPECT_NEAR(phase_gap(out.term(i).bus.phase, want), 0.0, 1e-12);

      // Same branch evolved with independently exponentiated matrices.
      const Eigen::MatrixXcd u = oracle::displacement(kI * b2 * double(s2), n) *
                                 oracle::displacement(b1 * double(s1), n) *
                                 oracle::displacement(-kI * b2 * double(s2), n) *
                                 oracle::displacement(-b1 * double(s1), n);
      const Eigen::VectorXcd fock = u * oracle::coherent(alpha0, n);
      const Eigen::VectorXcd exact =
          std::polar(1.0, out.term(i).bus.phase) * oracle::coherent(out.term(i).bus.amp, n);
      EXPECT_NEAR(std::abs(exact.dot(fock) - 1.0), 0.0, 1e-9);
    }
  }
}

TEST(ApplyLocalDiagonal, Identity) {
  std::mt19937_64 rng(203);
  const auto s = random_state(rng, 0.0);
  const auto out = apply_local_diagonal(s, 0, {1.0, 1.0});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out.term(i).coeff, s.term(i).coeff);
}

TEST(ApplyLocalDiagonal, SigmaZPhaseOnFirstQubit) {
  const std::array<Complex, 4> c{1.0, 0.0, 1.0, 0.0};  // |00> + |10>
  const auto out = apply_local_diagonal(init_state(c, 0.0), 0,
                                        {std::polar(1.0, std::numbers::pi / 4.0),
                                         std::polar(1.0, -std::numbers::pi / 4.0)});
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(out.term(0).coeff - h * std::polar(1.0, std::numbers::pi / 4.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out.term(2).coeff - h * std::polar(1.0, -std::numbers::pi / 4.0)), 0.0, 1e-15);
}

TEST(ApplyLocalDiagonal, RejectsNonUnitary) {
  std::mt19937_64 rng(204);
  EXPECT_THROW(apply_local_diagonal(random_state(rng, 0.0), 1, {1.0, 1.0 + 1e-9}), NonUnitaryError);
  EXPECT_THROW(apply_local_diagonal(random_state(rng, 0.0), 2, {1.0, 1.0}), IndexError);
}

TEST(ApplyLocalDiagonal, CorrectionsGiveControlledZ) {
  std::mt19937_64 rng(205);
  const auto in = random_state(rng, 0.0);
  auto out = run_exact(build_utot(kB, kB), in);
  const auto local = TwoQubitTarget::cz_local_correction();
  out = apply_local_diagonal(apply_local_diagonal(out, 0, local), 1, local);
  const std::array<double, 4> cz{1, 1, 1, -1};
  const Complex global = TwoQubitTarget::cz_global_correction();
  for (std::size_t i = 0; i < 4; ++i) {
    const Complex got = global * out.term(i).coeff * std::polar(1.0, out.term(i).bus.phase);
    EXPECT_NEAR(std::abs(got - cz[i] * in.term(i).coeff), 0.0, 1e-14);
  }
}

TEST(ReducedDensity, DisentangledIsPure) {
  std::mt19937_64 rng(206);
  const auto rho = reduced_qubit_density(random_state(rng, {1.0, 2.0}));
  EXPECT_NEAR(purity(rho), 1.0, 1e-14);
  expect_valid_density(rho);
}

TEST(ReducedDensity, OppositeBranchesDecohere) {
  const std::array<Complex, 2> plus{1.0, 1.0};
  const auto s = apply_conditional(init_state(plus, 0.0), ConditionalBusOp::displacement(0, 1.0));
  const auto rho = reduced_qubit_density(s);
  // Coherence factor relative to the pure |+> value 1/2.
  EXPECT_NEAR(2.0 * std::abs(rho(0, 1)), std::exp(-2.0), 1e-15);
  EXPECT_NEAR((rho - fock_density(s, 64)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(ReducedDensity, MatchesFockPartialTrace) {
  std::mt19937_64 rng(207);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_state(rng, oracle::random_complex(rng, 1.0));
    s = apply_conditional(s, ConditionalBusOp::displacement(0, oracle::random_complex(rng, 0.5)));
    s = apply_conditional(s, ConditionalBusOp::rotation(1, oracle::uniform(rng, -3, 3)));
    s = apply_conditional(s, ConditionalBusOp::displacement(1, oracle::random_complex(rng, 0.5)));
    const auto rho = reduced_qubit_density(s);
    expect_valid_density(rho);
    EXPECT_LT((rho - fock_density(s, 128)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ReducedDensity, RandomStatesAreValid) {
  std::mt19937_64 rng(208);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_state(rng, oracle::random_complex(rng, 2.0));
    s = apply_conditional(s, ConditionalBusOp::displacement(trial % 2, oracle::random_complex(rng, 2.0)));
    expect_valid_density(reduced_qubit_density(s));
  }
}

TEST(Defect, ClosedGateIsZero) {
  std::mt19937_64 rng(209);
  const auto out = run_exact(build_utot(kB, kB), random_state(rng, {0.2, 0.1}));
  EXPECT_LE(bus_disentanglement_defect(out), 1e-12);
  EXPECT_NEAR(purity(reduced_qubit_density(out)), 1.0, 1e-12);
}

TEST(Defect, MidGateSeparation) {
  const std::array<Complex, 4> uniform{0.5, 0.5, 0.5, 0.5};
  const auto s = apply_conditional(init_state(uniform, 0.0), ConditionalBusOp::displacement(0, -kB));
  EXPECT_NEAR(bus_disentanglement_defect(s), 2.0 * kB, 1e-15);
  EXPECT_NEAR(bus_disentanglement_defect(s), 1.2533141373155, 1e-12);
  EXPECT_LT(purity(reduced_qubit_density(s)), 1.0 - 1e-3);
}

TEST(Defect, SingleTermIsZero) {
  const std::array<Complex, 4> c{0.0, 0.0, 1.0, 0.0};
  const auto s = apply_conditional(init_state(c, 0.0), ConditionalBusOp::displacement(0, 3.0));
  EXPECT_EQ(bus_disentanglement_defect(s), 0.0);
}

TEST(Properties, NormPreserved) {
  std::mt19937_64 rng(210);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_state(rng, oracle::random_complex(rng, 1.0));
    for (int k = 0; k < 6; ++k) {
      const std::size_t q = rng() % 2;
      const BusOp a{oracle::uniform(rng, -3, 3), oracle::random_complex(rng, 2.0), oracle::uniform(rng, -3, 3)};
      const BusOp b{oracle::uniform(rng, -3, 3), oracle::random_complex(rng, 2.0), oracle::uniform(rng, -3, 3)};
      s = apply_conditional(s, ConditionalBusOp{q, a, b});
      s = apply_local_diagonal(s, q, {std::polar(1.0, oracle::uniform(rng, -3, 3)), 1.0});
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    }
  }
}

TEST(Properties, DifferentQubitOrderMatchesBranchComposition) {
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(rng, oracle::random_complex(rng, 1.0));
    const ConditionalBusOp a{0, {0.1, oracle::random_complex(rng, 1.0), 0.3}, {0.0, oracle::random_complex(rng, 1.0), -0.3}};
    const ConditionalBusOp b{1, {0.0, oracle::random_complex(rng, 1.0), 0.7}, {0.2, oracle::random_complex(rng, 1.0), 0.0}};
    const auto ab = apply_conditional(apply_conditional(s, a), b);
    const auto ba = apply_conditional(apply_conditional(s, b), a);
    for (std::size_t i = 0; i < 4; ++i) {
      const Bitstring bits{i, 2};
      const BusOp op_a = a.for_sign(bits.sign(0)), op_b = b.for_sign(bits.sign(1));
      const auto want_ab = apply_to_coherent(compose(op_a, op_b), s.term(i).bus);
      const auto want_ba = apply_to_coherent(compose(op_b, op_a), s.term(i).bus);
      EXPECT_NEAR(std::abs(ab.term(i).bus.amp - want_ab.amp), 0.0, 1e-12);
      EXPECT_NEAR(phase_gap(ab.term(i).bus.phase, want_ab.phase), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(ba.term(i).bus.amp - want_ba.amp), 0.0, 1e-12);
      EXPECT_NEAR(phase_gap(ba.term(i).bus.phase, want_ba.phase), 0.0, 1e-12);
    }
  }
}

TEST(Properties, PurityOneIffDisentangled) {
  std::mt19937_64 rng(212);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_state(rng, 0.0);
    const double size = trial % 2 == 0 ? 0.0 : oracle::uniform(rng, 0.05, 1.0);
    s = apply_conditional(s, ConditionalBusOp::displacement(0, size));
    const bool disentangled = bus_disentanglement_defect(s) == 0.0;
    const double p = purity(reduced_qubit_density(s));
    if (disentangled) {
      EXPECT_NEAR(p, 1.0, 1e-10);
    } else {
      EXPECT_LT(p, 1.0 - 1e-10);
    }
  }
}
