#include "qubus/phase_space.hpp"

#include <cmath>
#include <numbers>

#include "qubus/errors.hpp"

namespace qubus {

namespace {

Complex unit_phase(double angle) { return std::polar(1.0, angle); }

}  // namespace

bool BusOp::is_finite() const {
  return std::isfinite(phase) && std::isfinite(disp.real()) && std::isfinite(disp.imag()) &&
         std::isfinite(rot);
}

BusOp compose(const BusOp& first, const BusOp& second) {
  // D(b2) R(t2) D(b1) R(t1) = D(b2) D(b1 e^{-i t2}) R(t1 + t2)
  const Complex carried = first.disp * unit_phase(-second.rot);
  BusOp out;
  out.rot = first.rot + second.rot;
  out.disp = second.disp + carried;
  out.phase = first.phase + second.phase + std::imag(second.disp * std::conj(carried));
  return out;
}

BusOp compose_all(std::span<const BusOp> ops) {
  BusOp acc;
  for (const auto& op : ops) acc = compose(acc, op);
  return acc;
}

BusOp inverse(const BusOp& op) {
  // (e^{i f} D(b) R(t))^{-1} = e^{-i f} R(-t) D(-b) = e^{-i f} D(-b e^{i t}) R(-t)
  return {-op.phase, -op.disp * unit_phase(op.rot), -op.rot};
}

CoherentBranch apply_to_coherent(const BusOp& op, const CoherentBranch& input) {
  const Complex rotated = input.amp * unit_phase(-op.rot);
  return {input.phase + op.phase + std::imag(op.disp * std::conj(rotated)), op.disp + rotated};
}

Complex coherent_overlap(const CoherentBranch& a, const CoherentBranch& b) {
  const double log_mag = -0.5 * std::norm(a.amp) - 0.5 * std::norm(b.amp);
  const Complex cross = std::conj(a.amp) * b.amp;
  return std::exp(Complex(log_mag, b.phase - a.phase) + cross);
}

double wrap_phase(double phase) {
  double r = std::remainder(phase, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

bool PhaseSpacePath::is_closed(double tol) const {
  if (vertices.empty()) return true;
  return std::abs(vertices.back() - vertices.front()) <= tol;
}

PhaseSpacePath trace_path(Complex start, std::span<const BusOp> ops) {
  PhaseSpacePath path;
  path.vertices.reserve(ops.size() + 1);
  CoherentBranch branch{0.0, start};
  path.vertices.push_back(start);
  for (const auto& op : ops) {
    branch = apply_to_coherent(op, branch);
    path.vertices.push_back(branch.amp);
  }
  return path;
}

double loop_area(const PhaseSpacePath& path, double tol) {
  if (!path.is_closed(tol)) {
    throw OpenPathError("loop_area: path does not close (gap " +
                        std::to_string(std::abs(path.vertices.back() - path.vertices.front())) +
                        ")");
  }
  const auto& v = path.vertices;
  if (v.size() < 3) return 0.0;
  // Shoelace relative to the first vertex keeps cancellation small.
  const Complex origin = v.front();
  double twice_area = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const Complex a = v[k - 1] - origin;
    const Complex b = v[k] - origin;
    twice_area += QuadratureConvention::x(a) * QuadratureConvention::p(b) -
                  QuadratureConvention::x(b) * QuadratureConvention::p(a);
  }
  return 0.5 * twice_area;
}

}  // namespace qubus
