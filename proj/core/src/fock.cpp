#include "qubus/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qubus/errors.hpp"
#include "qubus/expm.hpp"
#include "qubus/loss.hpp"

namespace qubus::fock {

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr Complex kI{0.0, 1.0};

void check_cutoff(int cutoff) {
  if (cutoff < 2) throw CutoffTooSmall("Fock cutoff must be at least 2");
}

Eigen::Index joint_dim(std::size_t qubits, int cutoff) {
  return static_cast<Eigen::Index>(std::size_t{1} << qubits) * cutoff;
}

int sign_of(const Bitstring& bits, const PrimitiveOp& op) {
  if (std::holds_alternative<UncondDisp>(op)) return +1;
  return std::visit(
      [&](const auto& p) -> int {
        if constexpr (requires { p.qubit; }) {
          return bits.sign(p.qubit);
        } else {
          return +1;
        }
      },
      op);
}

double edge_weight(const FockVector& v, int guard) {
  const int first = std::max(0, v.cutoff - guard);
  double w = 0.0;
  for (std::size_t b = 0; b < v.blocks(); ++b) {
    w += v.block(b).segment(first, v.cutoff - first).squaredNorm();
  }
  return w;
}

}  // namespace

int cutoff_rule(double amplitude) {
  const double a = std::abs(amplitude);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 20.0));
}

int interior_limit(int cutoff, double excursion) {
  if (cutoff < 20) return -1;
  const double max_amp = -4.0 + std::sqrt(static_cast<double>(cutoff) - 4.0);
  const double root = max_amp - std::abs(excursion);
  if (root < 0.0) return -1;
  return std::min(cutoff - 1, static_cast<int>(std::floor(root * root)));
}

Matrix annihilation(int cutoff) {
  check_cutoff(cutoff);
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix number(int cutoff) {
  check_cutoff(cutoff);
  Matrix n = Matrix::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

FockMatrix build_displacement(Complex beta, int cutoff, bool strict) {
  check_cutoff(cutoff);
  if (strict && cutoff < cutoff_rule(std::abs(beta))) {
    throw CutoffTooSmall("displacement of magnitude " + std::to_string(std::abs(beta)) +
                         " needs cutoff >= " + std::to_string(cutoff_rule(std::abs(beta))));
  }
  const Matrix a = annihilation(cutoff);
  if (beta == Complex{}) return {cutoff, 0, Matrix::Identity(cutoff, cutoff)};
  const Matrix generator = beta * a.adjoint() - std::conj(beta) * a;
  return {cutoff, 0, expm(generator)};
}

FockMatrix build_rotation(double theta, int cutoff) {
  check_cutoff(cutoff);
  Matrix r = Matrix::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) r(n, n) = std::polar(1.0, -theta * n);
  return {cutoff, 0, r};
}

FockMatrix build_drive(double eps, double chi_eff, double t, double drive_phase, int cutoff) {
  check_cutoff(cutoff);
  const Matrix a = annihilation(cutoff);
  const Complex turn = std::polar(1.0, drive_phase);
  const Matrix h = eps * (turn * a.adjoint() + std::conj(turn) * a) + chi_eff * number(cutoff);
  return {cutoff, 0, expm(-kI * t * h)};
}

FockMatrix build_bus_op(const BusOp& op, int cutoff) {
  const Matrix d = build_displacement(op.disp, cutoff).data;
  const Matrix r = build_rotation(op.rot, cutoff).data;
  return {cutoff, 0, std::polar(1.0, op.phase) * (d * r)};
}

Matrix branch_matrix(const PrimitiveOp& op, int sign, int cutoff) {
  if (const auto* d = std::get_if<UncondDisp>(&op)) return build_displacement(d->beta, cutoff).data;
  if (const auto* r = std::get_if<CondRot>(&op)) return build_rotation(sign * r->theta, cutoff).data;
  if (const auto* c = std::get_if<CondDisp>(&op)) {
    return build_displacement(static_cast<double>(sign) * c->beta, cutoff).data;
  }
  const auto& p = std::get<DrivePulse>(op);
  return build_drive(p.eps, p.sign * p.chi * sign, p.duration, p.drive_phase, cutoff).data;
}

Vector coherent_state(Complex amp, int cutoff) {
  check_cutoff(cutoff);
  Vector v(cutoff);
  v(0) = std::exp(-0.5 * std::norm(amp));
  for (int n = 1; n < cutoff; ++n) v(n) = v(n - 1) * amp / std::sqrt(static_cast<double>(n));
  return v;
}

FockVector product_state(std::span<const Complex> coeffs, const Vector& bus) {
  std::size_t qubits = 0;
  if (coeffs.size() == 2) {
    qubits = 1;
  } else if (coeffs.size() == 4) {
    qubits = 2;
  } else {
    throw ShapeMismatch("product_state expects 2 or 4 coefficients");
  }
  double norm2 = 0.0;
  for (const auto& c : coeffs) norm2 += std::norm(c);
  if (!(norm2 > 1e-300)) throw ZeroNormError("product_state: coefficients have zero norm");
  const double scale = 1.0 / std::sqrt(norm2);

  FockVector v;
  v.cutoff = static_cast<int>(bus.size());
  v.qubits = qubits;
  v.amps = Vector::Zero(joint_dim(qubits, v.cutoff));
  FockInputRecord record;
  record.bus = bus;
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    record.coeffs.push_back(coeffs[b] * scale);
    v.block(b) = (coeffs[b] * scale) * bus;
  }
  v.input = std::move(record);
  return v;
}

FockVector from_hybrid(const HybridState& state, int cutoff) {
  if (state.env_modes() != 0) {
    throw std::invalid_argument("from_hybrid: environment branches have no single-mode image");
  }
  FockVector v;
  v.cutoff = cutoff;
  v.qubits = state.num_qubits();
  v.amps = Vector::Zero(joint_dim(v.qubits, cutoff));
  for (std::size_t b = 0; b < state.dimension(); ++b) {
    const auto& t = state.term(b);
    v.block(b) = t.coeff * std::polar(1.0, t.bus.phase) * coherent_state(t.bus.amp, cutoff);
  }
  if (const auto& rec = state.input()) {
    v.input = FockInputRecord{rec->coeffs, coherent_state(rec->bus_amp, cutoff)};
  }
  return v;
}

EvolveResult evolve(const GateSequence& seq, const FockVector& input, const EvolveOptions& options) {
  seq.validate(input.qubits);
  if (seq.has_loss()) {
    throw std::invalid_argument("fock::evolve: lossy primitives need two_mode_lossy_density");
  }
  EvolveResult result{input, 0.0, edge_weight(input, options.guard)};
  const double norm_in = input.amps.squaredNorm();
  FockVector& v = result.state;
  for (const auto& p : seq.primitives()) {
    const Matrix plus = branch_matrix(p.op, +1, v.cutoff);
    const bool conditional = !std::holds_alternative<UncondDisp>(p.op);
    const Matrix minus = conditional ? branch_matrix(p.op, -1, v.cutoff) : plus;
    for (std::size_t b = 0; b < v.blocks(); ++b) {
      const int s = sign_of(Bitstring{b, v.qubits}, p.op);
      const Vector next = (s > 0 ? plus : minus) * v.block(b);
      v.block(b) = next;
    }
    result.edge_population = std::max(result.edge_population, edge_weight(v, options.guard));
  }
  result.norm_defect = norm_in > 0.0 ? std::abs(1.0 - v.amps.squaredNorm() / norm_in) : 0.0;
  if (options.strict && result.leakage() > options.leakage_tolerance) {
    throw CutoffTooSmall("fock::evolve: truncation leakage " + std::to_string(result.leakage()) +
                         " exceeds " + std::to_string(options.leakage_tolerance) + " at cutoff " +
                         std::to_string(v.cutoff));
  }
  return result;
}

FockMatrix compose_sequence(const GateSequence& seq, std::size_t qubits, int cutoff) {
  seq.validate(qubits);
  check_cutoff(cutoff);
  const std::size_t dim = std::size_t{1} << qubits;
  std::vector<Matrix> blocks(dim, Matrix::Identity(cutoff, cutoff));
  for (const auto& p : seq.primitives()) {
    const Matrix plus = branch_matrix(p.op, +1, cutoff);
    const bool conditional = !std::holds_alternative<UncondDisp>(p.op);
    const Matrix minus = conditional ? branch_matrix(p.op, -1, cutoff) : plus;
    for (std::size_t b = 0; b < dim; ++b) {
      const int s = sign_of(Bitstring{b, qubits}, p.op);
      blocks[b] = (s > 0 ? plus : minus) * blocks[b];
    }
  }
  FockMatrix out{cutoff, qubits, Matrix::Zero(joint_dim(qubits, cutoff), joint_dim(qubits, cutoff))};
  for (std::size_t b = 0; b < dim; ++b) {
    const auto offset = static_cast<Eigen::Index>(b) * cutoff;
    out.data.block(offset, offset, cutoff, cutoff) = blocks[b];
  }
  return out;
}

FockMatrix qubit_diagonal(std::span<const Complex> phases, int cutoff) {
  check_cutoff(cutoff);
  std::size_t qubits = 0;
  while ((std::size_t{1} << qubits) < phases.size()) ++qubits;
  if ((std::size_t{1} << qubits) != phases.size()) {
    throw ShapeMismatch("qubit_diagonal: phase count must be a power of two");
  }
  FockMatrix out{cutoff, qubits, Matrix::Zero(joint_dim(qubits, cutoff), joint_dim(qubits, cutoff))};
  for (std::size_t b = 0; b < phases.size(); ++b) {
    const auto offset = static_cast<Eigen::Index>(b) * cutoff;
    out.data.block(offset, offset, cutoff, cutoff) =
        phases[b] * Matrix::Identity(cutoff, cutoff);
  }
  return out;
}

double operator_distance(const GateSequence& seq, const FockMatrix& target, PhotonRange interior) {
  if (target.data.rows() != joint_dim(target.qubits, target.cutoff) ||
      target.data.cols() != target.data.rows()) {
    throw ShapeMismatch("operator_distance: target is not a joint square matrix");
  }
  if (seq.qubits_referenced() > target.qubits) {
    throw ShapeMismatch("operator_distance: sequence addresses more qubits than the target");
  }
  if (interior.first < 0 || interior.last >= target.cutoff || interior.first > interior.last) {
    throw ShapeMismatch("operator_distance: interior range outside the cutoff");
  }
  const FockMatrix composed = compose_sequence(seq, target.qubits, target.cutoff);
  const std::size_t dim = std::size_t{1} << target.qubits;
  const int width = interior.last - interior.first + 1;
  double worst = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const auto ro = static_cast<Eigen::Index>(r) * target.cutoff + interior.first;
      const auto co = static_cast<Eigen::Index>(c) * target.cutoff + interior.first;
      const Matrix diff = composed.data.block(ro, co, width, width) -
                          target.data.block(ro, co, width, width);
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

FockVector apply_local(const FockVector& state, std::size_t qubit, const Eigen::Matrix2cd& unitary) {
  if (qubit >= state.qubits) throw IndexError("apply_local: qubit out of range");
  FockVector out = state;
  const std::size_t stride = std::size_t{1} << (state.qubits - 1 - qubit);
  for (std::size_t b = 0; b < state.blocks(); ++b) {
    if (b & stride) continue;
    const std::size_t b1 = b | stride;
    out.block(b) = unitary(0, 0) * state.block(b) + unitary(0, 1) * state.block(b1);
    out.block(b1) = unitary(1, 0) * state.block(b) + unitary(1, 1) * state.block(b1);
  }
  return out;
}

double state_fidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeMismatch("state_fidelity: size mismatch");
  return std::norm(a.dot(b));
}

DensityMatrix reduced_density(const FockVector& state) {
  const auto dim = static_cast<Eigen::Index>(state.blocks());
  DensityMatrix rho(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      rho(r, c) = state.block(static_cast<std::size_t>(c))
                      .dot(state.block(static_cast<std::size_t>(r)));
    }
  }
  return rho;
}

Complex mean_amplitude(const FockVector& state, std::size_t bits) {
  const Vector blk = state.block(bits);
  const double w = blk.squaredNorm();
  if (w == 0.0) return {};
  Complex acc{};
  for (int n = 1; n < state.cutoff; ++n) {
    acc += std::conj(blk(n - 1)) * std::sqrt(static_cast<double>(n)) * blk(n);
  }
  return acc / w;
}

namespace {

// Beam splitter exp[angle (a^dag b - a b^dag)] on two truncated modes. The
// generator conserves total photon number, so it is exponentiated one
// fixed-total block at a time.
class BeamSplitter {
 public:
  BeamSplitter(double angle, int cutoff) : cutoff_(cutoff) {
    for (int total = 0; total <= 2 * (cutoff - 1); ++total) {
      const int lo = std::max(0, total - (cutoff - 1));
      const int hi = std::min(total, cutoff - 1);
      const int size = hi - lo + 1;
      Matrix gen = Matrix::Zero(size, size);
      // Basis |j, total - j> for j in [lo, hi]; j counts system photons.
      for (int j = lo; j < hi; ++j) {
        // a^dag b: |j, k> -> sqrt(j+1) sqrt(k) |j+1, k-1>
        const int k = total - j;
        const double amp = std::sqrt(static_cast<double>(j + 1) * k);
        gen(j + 1 - lo, j - lo) += angle * amp;
        gen(j - lo, j + 1 - lo) -= angle * amp;
      }
      blocks_.push_back({lo, expm(gen)});
    }
  }

  Vector apply(const Vector& v, bool adjoint) const {
    Vector out = Vector::Zero(v.size());
    for (std::size_t total = 0; total < blocks_.size(); ++total) {
      const auto& [lo, u] = blocks_[total];
      const auto size = u.rows();
      Vector local(size);
      for (Eigen::Index i = 0; i < size; ++i) local(i) = v(index(lo + i, total));
      const Vector mapped = adjoint ? Vector(u.adjoint() * local) : Vector(u * local);
      for (Eigen::Index i = 0; i < size; ++i) out(index(lo + i, total)) = mapped(i);
    }
    return out;
  }

 private:
  Eigen::Index index(Eigen::Index system, std::size_t total) const {
    return system * cutoff_ + (static_cast<Eigen::Index>(total) - system);
  }

  int cutoff_;
  std::vector<std::pair<int, Matrix>> blocks_;
};

Vector apply_system(const Matrix& op, const Vector& v, int cutoff) {
  // v indexed system * cutoff + ancilla; apply op to the system factor.
  const Eigen::Map<const Matrix> as_matrix(v.data(), cutoff, cutoff);  // (ancilla, system)
  const Matrix mapped = as_matrix * op.transpose();
  return Eigen::Map<const Vector>(mapped.data(), mapped.size());
}

}  // namespace

DensityMatrix two_mode_lossy_density(const HybridState& input, Complex beta, std::size_t qubit,
                                     double eta, int cutoff) {
  check_eta(eta);
  check_cutoff(cutoff);
  if (input.env_modes() != 0) {
    throw std::invalid_argument("two_mode_lossy_density: input must be lossless");
  }
  if (qubit >= input.num_qubits()) throw IndexError("two_mode_lossy_density: qubit out of range");

  const BeamSplitter splitter(std::asin(eta), cutoff);
  const Matrix d_plus = build_displacement(beta, cutoff).data;
  const Matrix d_minus = build_displacement(-beta, cutoff).data;
  Vector vacuum = Vector::Zero(cutoff);
  vacuum(0) = 1.0;

  std::vector<Vector> branches;
  for (std::size_t b = 0; b < input.dimension(); ++b) {
    const auto& t = input.term(b);
    const Vector system = std::polar(1.0, t.bus.phase) * coherent_state(t.bus.amp, cutoff);
    // Kronecker layout system * cutoff + ancilla.
    Vector joint(static_cast<Eigen::Index>(cutoff) * cutoff);
    for (int j = 0; j < cutoff; ++j) joint.segment(j * cutoff, cutoff) = system(j) * vacuum;
    const int s = input.bitstring(b).sign(qubit);
    Vector out = splitter.apply(joint, true);
    out = apply_system(s > 0 ? d_plus : d_minus, out, cutoff);
    out = splitter.apply(out, false);
    branches.push_back(t.coeff * out);
  }
  const auto dim = static_cast<Eigen::Index>(branches.size());
  DensityMatrix rho(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      rho(r, c) = branches[static_cast<std::size_t>(c)].dot(branches[static_cast<std::size_t>(r)]);
    }
  }
  return rho;
}

}  // namespace qubus::fock
