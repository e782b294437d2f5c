#include "qubus/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qubus/drive.hpp"
#include "qubus/errors.hpp"
#include "qubus/hybrid_state.hpp"

namespace qubus {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kPulses = 8;
constexpr std::size_t kPairs = 4;

// Forward-mode tangent of compose(first, second).
BusOp compose_tangent(const BusOp& first, const BusOp& d_first, const BusOp& second,
                      const BusOp& d_second) {
  const Complex turn = std::polar(1.0, -second.rot);
  const Complex carried = first.disp * turn;
  const Complex d_carried = (d_first.disp - kI * d_second.rot * first.disp) * turn;
  BusOp out;
  out.rot = d_first.rot + d_second.rot;
  out.disp = d_second.disp + d_carried;
  out.phase = d_first.phase + d_second.phase +
              std::imag(d_second.disp * std::conj(carried) + second.disp * std::conj(d_carried));
  return out;
}

std::vector<DrivePulse> pulses_of(const GateSequence& seq) {
  std::vector<DrivePulse> out;
  for (const auto& p : seq.primitives()) {
    const auto* pulse = std::get_if<DrivePulse>(&p.op);
    if (!pulse) throw std::invalid_argument("drive_jacobian: sequence must contain drive pulses only");
    out.push_back(*pulse);
  }
  return out;
}

GateSequence make_schedule(const Eigen::VectorXd& x, double chi) {
  GateSequence seq;
  for (std::size_t k = 0; k < kPairs; ++k) {
    const std::size_t qubit = k % 2;
    const double phase = qubit == 0 ? 0.0 : std::numbers::pi / 2.0;
    const double t = x(static_cast<Eigen::Index>(kPulses + k));
    seq.add(DrivePulse{x(static_cast<Eigen::Index>(2 * k)), phase, +1, t, chi, qubit});
    seq.add(DrivePulse{x(static_cast<Eigen::Index>(2 * k + 1)), phase, -1, t, chi, qubit});
  }
  return seq;
}

struct Evaluation {
  Eigen::VectorXd residual;  // 12
  Eigen::MatrixXd jacobian;  // 12 x 12
};

Evaluation evaluate(const Eigen::VectorXd& x, double chi, double target) {
  const auto jac = drive_jacobian(make_schedule(x, chi));
  Evaluation ev;
  ev.residual.resize(12);
  ev.jacobian.setZero(12, 12);
  for (std::size_t b = 0; b < 4; ++b) {
    const Bitstring bits{b, 2};
    const auto r = static_cast<Eigen::Index>(b);
    ev.residual(2 * r) = jac.disps[b].real();
    ev.residual(2 * r + 1) = jac.disps[b].imag();
    ev.residual(8 + r) = wrap_phase(jac.phases[b] - target * bits.sign(0) * bits.sign(1));
    // Map per-pulse columns onto the solver unknowns: eps_j direct, t_k shared by a pair.
    for (Eigen::Index row = 0; row < 3; ++row) {
      const Eigen::Index src = 4 * r + row;
      const Eigen::Index dst = row < 2 ? 2 * r + row : 8 + r;
      for (std::size_t j = 0; j < kPulses; ++j) {
        ev.jacobian(dst, static_cast<Eigen::Index>(j)) = jac.jacobian(src, static_cast<Eigen::Index>(j));
      }
      for (std::size_t k = 0; k < kPairs; ++k) {
        ev.jacobian(dst, static_cast<Eigen::Index>(kPulses + k)) =
            jac.jacobian(src, static_cast<Eigen::Index>(kPulses + 2 * k)) +
            jac.jacobian(src, static_cast<Eigen::Index>(kPulses + 2 * k + 1));
      }
    }
  }
  return ev;
}

void clamp(Eigen::VectorXd& x, double eps_max) {
  for (std::size_t j = 0; j < kPulses; ++j) {
    auto& e = x(static_cast<Eigen::Index>(j));
    e = std::clamp(e, -eps_max, eps_max);
  }
  for (std::size_t k = 0; k < kPairs; ++k) {
    auto& t = x(static_cast<Eigen::Index>(kPulses + k));
    t = std::max(t, 0.0);
  }
}

}  // namespace

double conditional_phase(const std::array<double, 4>& phases) {
  return (phases[0] - phases[1] - phases[2] + phases[3]) / 4.0;
}

DriveJacobian drive_jacobian(const GateSequence& drive_only) {
  const auto pulses = pulses_of(drive_only);
  const std::size_t count = pulses.size();
  DriveJacobian out;
  out.jacobian.setZero(16, static_cast<Eigen::Index>(2 * count));
  for (std::size_t b = 0; b < 4; ++b) {
    const Bitstring bits{b, 2};
    BusOp acc;
    std::vector<BusOp> d_acc(2 * count);
    for (std::size_t j = 0; j < count; ++j) {
      const auto& p = pulses[j];
      const double chi = p.sign * p.chi * bits.sign(p.qubit);
      const auto tangent = drive_evolution_tangent(p.eps, chi, p.duration, p.drive_phase);
      for (std::size_t col = 0; col < 2 * count; ++col) {
        BusOp d_op;
        if (col == j) d_op = tangent.d_eps;
        if (col == count + j) d_op = tangent.d_t;
        d_acc[col] = compose_tangent(acc, d_acc[col], tangent.value, d_op);
      }
      acc = compose(acc, tangent.value);
    }
    out.phases[b] = acc.phase;
    out.disps[b] = acc.disp;
    out.rots[b] = acc.rot;
    const auto row = static_cast<Eigen::Index>(4 * b);
    for (std::size_t col = 0; col < 2 * count; ++col) {
      const auto c = static_cast<Eigen::Index>(col);
      out.jacobian(row, c) = d_acc[col].disp.real();
      out.jacobian(row + 1, c) = d_acc[col].disp.imag();
      out.jacobian(row + 2, c) = d_acc[col].phase;
      out.jacobian(row + 3, c) = d_acc[col].rot;
    }
  }
  return out;
}

std::vector<double> conditional_phase_gradient(const GateSequence& drive_only) {
  const auto jac = drive_jacobian(drive_only);
  const auto count = static_cast<std::size_t>(jac.jacobian.cols() / 2);
  std::vector<double> grad(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    grad[j] = (jac.jacobian(2, c) - jac.jacobian(6, c) - jac.jacobian(10, c) + jac.jacobian(14, c)) / 4.0;
  }
  return grad;
}

EightPulseSchedule solve_eight_op_schedule(double target_phase, double chi, double eps_max,
                                           const SolverOptions& options) {
  if (chi == 0.0) throw DegenerateCoupling("solve_eight_op_schedule: chi must be nonzero");
  if (!(eps_max > 0.0)) throw std::invalid_argument("solve_eight_op_schedule: eps_max must be positive");

  EightPulseSchedule out;
  out.target_phase = target_phase;
  out.chi = chi;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(12);
  if (target_phase == 0.0) {
    out.sequence = make_schedule(x, chi);
    return out;
  }

  // Seed: at chi t = pi each pair is a pure conditional displacement of
  // (4 eps / chi) s, and 2 c1 c2 = target. Start from a detuned duration.
  const double c = std::sqrt(std::abs(target_phase) / 2.0);
  const double sgn = target_phase > 0.0 ? 1.0 : -1.0;
  const std::array<double, kPairs> pair_c{c, sgn * c, -c, -sgn * c};
  for (std::size_t k = 0; k < kPairs; ++k) {
    const double eps = pair_c[k] * chi / 4.0;
    x(static_cast<Eigen::Index>(2 * k)) = eps;
    x(static_cast<Eigen::Index>(2 * k + 1)) = eps;
    x(static_cast<Eigen::Index>(kPulses + k)) = 0.9 * std::numbers::pi / std::abs(chi);
  }
  clamp(x, eps_max);

  Evaluation ev = evaluate(x, chi, target_phase);
  double cost = ev.residual.squaredNorm();
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (ev.residual.cwiseAbs().maxCoeff() <= options.tolerance) break;
    const Eigen::MatrixXd jtj = ev.jacobian.transpose() * ev.jacobian;
    const Eigen::VectorXd grad = ev.jacobian.transpose() * ev.residual;
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda * (jtj.diagonal().array() + 1e-12);
      Eigen::VectorXd candidate = x - damped.ldlt().solve(grad);
      clamp(candidate, eps_max);
      Evaluation trial = evaluate(candidate, chi, target_phase);
      const double trial_cost = trial.residual.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        x = std::move(candidate);
        ev = std::move(trial);
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        improved = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }

  out.sequence = make_schedule(x, chi);
  out.iterations = iter;
  out.residual = ev.residual.cwiseAbs().maxCoeff();
  if (out.residual > options.tolerance * 100.0) {
    throw NoSolutionFound("solve_eight_op_schedule: residual " + std::to_string(out.residual) +
                              " after " + std::to_string(iter) + " iterations",
                          out.residual);
  }
  return out;
}

}  // namespace qubus
