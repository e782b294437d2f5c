#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qubus/drive.hpp"
#include "qubus/errors.hpp"
#include "qubus/fock.hpp"

using namespace qubus;

namespace {

constexpr Complex kI{0.0, 1.0};

// <exact|fock> for a drive pulse acting on |start>, both with phases.
Complex drive_overlap(double eps, double chi, double t, double phi, Complex start) {
  const double reach = std::min(2.0 * std::abs(eps / chi), std::abs(eps) * t);
  const int n = std::max(48, fock::cutoff_rule(std::abs(start) + reach));
  const auto op = drive_evolution(eps, chi, t, phi);
  const auto out = apply_to_coherent(op, {0.0, start});
  const Eigen::VectorXcd fock = oracle::drive(eps, chi, t, phi, n) * oracle::coherent(start, n);
  const Eigen::VectorXcd exact = std::polar(1.0, out.phase) * oracle::coherent(out.amp, n);
  return exact.dot(fock);
}

void expect_op_near(const BusOp& got, const BusOp& want, double tol) {
  EXPECT_NEAR(got.phase, want.phase, tol);
  EXPECT_NEAR(std::abs(got.disp - want.disp), 0.0, tol);
  EXPECT_NEAR(got.rot, want.rot, tol);
}

}  // namespace

TEST(DriveEvolution, NoDriveIsRotation) {
  expect_op_near(drive_evolution(0.0, 0.7, 2.0), BusOp::rotation(1.4), 1e-15);
}

TEST(DriveEvolution, NoCouplingIsDisplacement) {
  const auto op = drive_evolution(1.5, 0.0, 2.0);
  expect_op_near(op, BusOp::displacement(-3.0 * kI), 0.0);
  const auto turned = drive_evolution(1.5, 0.0, 2.0, std::numbers::pi / 2.0);
  EXPECT_NEAR(std::abs(turned.disp - Complex(3.0, 0.0)), 0.0, 1e-15);
}

TEST(DriveEvolution, QuarterTurnValues) {
  const auto op = drive_evolution(1.0, 1.0, std::numbers::pi / 2.0);
  EXPECT_NEAR(std::abs(op.disp - Complex(-1.0, -1.0)), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(op.rot, std::numbers::pi / 2.0);
  EXPECT_NEAR(op.phase, std::numbers::pi / 2.0 - 1.0, 1e-15);

  const int n = 96;
  const Eigen::MatrixXcd u = fock::build_drive(1.0, 1.0, std::numbers::pi / 2.0, 0.0, n).data;
  const Eigen::VectorXcd exact = std::polar(1.0, op.phase) * oracle::coherent(op.disp, n);
  EXPECT_NEAR(std::abs(exact.dot(u.col(0)) - 1.0), 0.0, 1e-10);
}

TEST(DriveEvolution, MatchesFockGrid) {
  for (double eps : {0.0, 0.5, 1.0, 2.0}) {
    for (double chi : {-1.0, -0.1, 0.1, 1.0}) {
      for (double t : {0.1, 1.0, std::numbers::pi}) {
        for (Complex start : {Complex(0.0), Complex(0.5, -0.3)}) {
          const Complex ov = drive_overlap(eps, chi, t, 0.0, start);
          EXPECT_GE(std::norm(ov), 1.0 - 1e-8) << eps << " " << chi << " " << t;
          EXPECT_NEAR(std::arg(ov), 0.0, 1e-8) << eps << " " << chi << " " << t;
        }
      }
    }
  }
}

TEST(DriveEvolution, DrivePhaseMatchesFock) {
  for (double phi : {0.3, std::numbers::pi / 2.0, -2.0}) {
    const Complex ov = drive_overlap(0.9, 0.6, 1.7, phi, {0.2, 0.1});
    EXPECT_NEAR(std::abs(ov - 1.0), 0.0, 1e-9);
  }
}

TEST(DriveEvolution, SeriesIsContinuousAtThreshold) {
  for (double eps : {0.3, 2.0}) {
    const double t = 1.0;
    const double below = kDriveSeriesThreshold * (1.0 - 1e-9);
    const double above = kDriveSeriesThreshold * (1.0 + 1e-9);
    const auto a = drive_evolution(eps, below, t);
    const auto b = drive_evolution(eps, above, t);
    EXPECT_NEAR(std::abs(a.disp - b.disp), 0.0, 1e-13);
    EXPECT_NEAR(a.phase, b.phase, 1e-13);
    // Phase limit eps^2 chi t^3 / 6 for small chi t.
    EXPECT_NEAR(a.phase / (eps * eps * below * t * t * t / 6.0), 1.0, 1e-6);
  }
}

TEST(DriveEvolution, TangentMatchesFiniteDifferences) {
  const double h = 1e-6;
  for (double chi : {1.3, -0.4, 1e-8}) {
    for (double phi : {0.0, 0.7}) {
      const double eps = 0.8, t = 1.1;
      const auto tan = drive_evolution_tangent(eps, chi, t, phi);
      const auto fd = [&](const BusOp& p, const BusOp& m) {
        return BusOp{(p.phase - m.phase) / (2 * h), (p.disp - m.disp) / (2 * h), (p.rot - m.rot) / (2 * h)};
      };
      const BusOp de = fd(drive_evolution(eps + h, chi, t, phi), drive_evolution(eps - h, chi, t, phi));
      const BusOp dt = fd(drive_evolution(eps, chi, t + h, phi), drive_evolution(eps, chi, t - h, phi));
      expect_op_near(tan.d_eps, de, 1e-7);
      expect_op_near(tan.d_t, dt, 1e-7);
    }
  }
}

TEST(DriveComposite, ZeroDurationIsIdentity) {
  const auto c = drive_composite(0.8, 1.0, 0.0);
  expect_op_near(c.on_plus, BusOp{}, 0.0);
  expect_op_near(c.on_minus, BusOp{}, 0.0);
}

TEST(DriveComposite, PureDisplacementPerBranch) {
  for (double chi : {1.0, -0.7, 2.5}) {
    for (double t : {0.3, 1.0, 2.0}) {
      const double eps = 0.8;
      const auto c = drive_composite(eps, chi, t, 1);
      EXPECT_EQ(c.target, 1U);
      for (int s : {+1, -1}) {
        const Complex want = (2.0 * eps / (s * chi)) * (1.0 - std::exp(kI * (s * chi * t)));
        const auto& op = c.for_sign(s);
        EXPECT_NEAR(std::abs(op.disp - want), 0.0, 1e-14);
        EXPECT_NEAR(op.phase, 0.0, 1e-14);
        EXPECT_NEAR(op.rot, 0.0, 1e-15);
        // Magnitude form (-4 i eps / chi) sin(chi t / 2) e^{i s chi t / 2}.
        const Complex mag = (-4.0 * kI * eps / chi) * std::sin(chi * t / 2.0) *
                            std::exp(kI * (s * chi * t / 2.0));
        EXPECT_NEAR(std::abs(op.disp - mag), 0.0, 1e-14);
      }
      const auto parts = composite_components(eps, chi, t);
      EXPECT_NEAR(std::abs(c.on_plus.disp - (parts.unconditional + parts.conditional)), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(c.on_minus.disp - (parts.unconditional - parts.conditional)), 0.0, 1e-14);
    }
  }
}

TEST(DriveComposite, MatchesFockExponentiation) {
  const double eps = 0.8, chi = 1.0, t = 1.0;
  const int n = 96;
  const auto c = drive_composite(eps, chi, t);
  for (int s : {+1, -1}) {
    const Eigen::MatrixXcd u = oracle::drive(eps, -s * chi, t, 0.0, n) * oracle::drive(eps, s * chi, t, 0.0, n);
    const Eigen::VectorXcd fock = u.col(0);
    const Eigen::VectorXcd exact = std::polar(1.0, c.for_sign(s).phase) * oracle::coherent(c.for_sign(s).disp, n);
    EXPECT_GE(oracle::fidelity(exact, fock), 1.0 - 1e-8);
    EXPECT_NEAR(std::abs(exact.dot(fock) - 1.0), 0.0, 1e-10);
  }
}

TEST(DriveComposite, SmallCouplingComponents) {
  const double eps = 1.0, chi = 1.0, t = 1e-3;
  const auto parts = composite_components(eps, chi, t);
  EXPECT_NEAR(parts.conditional.real() / 1e-6, 1.0, 1e-6);
  EXPECT_EQ(parts.conditional.imag(), 0.0);
  EXPECT_NEAR(std::abs(parts.unconditional - Complex(0.0, -2e-3)), 0.0, 1e-9);

  const auto report = small_coupling_report(eps, chi, t);
  EXPECT_NEAR(std::abs(report.naive_conditional - Complex(0.0, 2e-3)), 0.0, 1e-18);
  EXPECT_NEAR(report.conditional_mismatch, std::abs(Complex(1e-6, -2e-3)), 1e-9);
  EXPECT_FALSE(report.describe().empty());
}

TEST(DriveComposite, ZeroCouplingThrows) {
  EXPECT_THROW(drive_composite(1.0, 0.0, 1.0), DegenerateCoupling);
  EXPECT_THROW(composite_components(1.0, 0.0, 1.0), DegenerateCoupling);
}
