#include "qubus/drive.hpp"

#include <cmath>
#include <sstream>

#include "qubus/errors.hpp"
#include "qubus/text.hpp"

namespace qubus {

namespace {

constexpr Complex kI{0.0, 1.0};

// w - sin w without cancellation for small w.
double w_minus_sin(double w) {
  if (std::abs(w) >= 0.5) return w - std::sin(w);
  const double w2 = w * w;
  double term = w * w2 / 6.0;
  double sum = 0.0;
  for (int k = 1; std::abs(term) > 1e-18 * std::abs(sum) && k < 20; ++k) {
    sum += term;
    term *= -w2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

DriveTangent tangent_unrotated(double eps, double chi, double t) {
  const double w = chi * t;
  DriveTangent out;
  out.value.rot = w;
  out.d_t.rot = chi;
  // d/dt of the displacement has no singularity at chi = 0.
  out.d_t.disp = -kI * eps * std::exp(-kI * w);

  if (std::abs(w) < kDriveSeriesThreshold) {
    // (e^{-iw} - 1) / w and (w - sin w) / w^2, (1 - cos w) / w to fourth order.
    const double w2 = w * w;
    const Complex disp_series = -kI - w / 2.0 + kI * w2 / 6.0 + w2 * w / 24.0 - kI * w2 * w2 / 120.0;
    const double phase_series = w / 6.0 - w2 * w / 120.0;
    const double dphase_series = w / 2.0 - w2 * w / 24.0;
    out.value.disp = eps * t * disp_series;
    out.value.phase = eps * eps * t * t * phase_series;
    out.d_eps.disp = t * disp_series;
    out.d_eps.phase = 2.0 * eps * t * t * phase_series;
    out.d_t.phase = eps * eps * t * dphase_series;
    return out;
  }
  // t eps^2 / chi - g^2 sin w = g^2 (w - sin w); e^{-iw} - 1 = -2i sin(w/2) e^{-iw/2}.
  const double g = eps / chi;
  const double half = std::sin(w / 2.0);
  const Complex e_minus_one = -2.0 * kI * half * std::exp(-kI * (w / 2.0));
  const double wms = w_minus_sin(w);
  out.value.disp = g * e_minus_one;
  out.value.phase = g * g * wms;
  out.d_eps.disp = e_minus_one / chi;
  out.d_eps.phase = 2.0 * g * wms / chi;
  out.d_t.phase = 2.0 * g * g * chi * half * half;
  return out;
}

}  // namespace

DriveTangent drive_evolution_tangent(double eps, double chi_eff, double t, double drive_phase) {
  DriveTangent out = tangent_unrotated(eps, chi_eff, t);
  if (drive_phase != 0.0) {
    const Complex turn = std::polar(1.0, drive_phase);
    out.value.disp *= turn;
    out.d_eps.disp *= turn;
    out.d_t.disp *= turn;
  }
  return out;
}

BusOp drive_evolution(double eps, double chi_eff, double t, double drive_phase) {
  return drive_evolution_tangent(eps, chi_eff, t, drive_phase).value;
}

ConditionalBusOp drive_composite(double eps, double chi, double t, std::size_t qubit,
                                 double drive_phase) {
  if (chi == 0.0) throw DegenerateCoupling("drive_composite: chi must be nonzero");
  ConditionalBusOp out;
  out.target = qubit;
  out.on_plus = compose(drive_evolution(eps, chi, t, drive_phase),
                        drive_evolution(eps, -chi, t, drive_phase));
  out.on_minus = compose(drive_evolution(eps, -chi, t, drive_phase),
                         drive_evolution(eps, chi, t, drive_phase));
  return out;
}

CompositeComponents composite_components(double eps, double chi, double t) {
  if (chi == 0.0) throw DegenerateCoupling("composite_components: chi must be nonzero");
  const double half = chi * t / 2.0;
  const double s = std::sin(half);
  return {Complex(4.0 * eps / chi * s * s, 0.0), -kI * (4.0 * eps / chi) * s * std::cos(half)};
}

SmallCouplingReport small_coupling_report(double eps, double chi, double t) {
  SmallCouplingReport r;
  r.eps = eps;
  r.chi = chi;
  r.t = t;
  const auto parts = composite_components(eps, chi, t);
  r.exact_conditional = parts.conditional;
  r.exact_unconditional = parts.unconditional;
  r.naive_conditional = 2.0 * kI * eps * t;
  r.leading_conditional = eps * chi * t * t;
  r.leading_unconditional = -2.0 * kI * eps * t;
  r.conditional_mismatch = std::abs(r.exact_conditional - r.naive_conditional);
  return r;
}

std::string SmallCouplingReport::describe() const {
  std::ostringstream out;
  out << "eps=" << format_real(eps) << " chi=" << format_real(chi) << " t=" << format_real(t)
      << ": exact conditional " << format_complex(exact_conditional) << " (leading "
      << format_complex(leading_conditional) << "), exact unconditional "
      << format_complex(exact_unconditional) << " (leading " << format_complex(leading_unconditional)
      << "), naive conditional 2i*eps*t = " << format_complex(naive_conditional)
      << ", mismatch " << format_real(conditional_mismatch);
  return out.str();
}

}  // namespace qubus
