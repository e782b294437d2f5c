#include "qubus/metrics.hpp"

#include <cmath>

#include "qubus/errors.hpp"
#include "qubus/execute.hpp"
#include "qubus/loss.hpp"

namespace qubus {

namespace {

Eigen::VectorXcd target_vector(std::span<const Complex> coeffs, const TwoQubitTarget& target) {
  Eigen::VectorXcd v(4);
  for (std::size_t b = 0; b < 4; ++b) v(static_cast<Eigen::Index>(b)) = target.phases[b] * coeffs[b];
  return v;
}

void fill_density_metrics(MetricsReport& report, const DensityMatrix& rho,
                          const Eigen::VectorXcd& target) {
  report.two_qubit_fidelity = std::real(target.dot(rho * target));
  report.purity = purity(rho);
  for (std::size_t k = 0; k < kCoherencePairs.size(); ++k) {
    const auto [r, c] = kCoherencePairs[k];
    report.coherence_magnitudes[k] = std::abs(rho(r, c));
  }
}

}  // namespace

MetricsReport gate_fidelity(const HybridState& final_state, const TwoQubitTarget& target) {
  if (final_state.num_qubits() != 2) throw ShapeMismatch("gate_fidelity needs a two-qubit state");
  const auto& input = final_state.input();
  if (!input) throw MissingInputRecord("gate_fidelity: state carries no input record");

  MetricsReport report;
  const CoherentBranch initial_bus{0.0, input->bus_amp};
  for (std::size_t b = 0; b < 4; ++b) {
    const auto& term = final_state.term(b);
    const Complex ratio = input->coeffs[b] == Complex{} ? Complex{1.0} : term.coeff / input->coeffs[b];
    report.conditional_phases[b] = std::arg(ratio * coherent_overlap(initial_bus, term.bus));

    double budget = 0.0;
    for (const auto& e : term.env) budget += std::norm(e.amp);
    report.env_photon_budget = std::max(report.env_photon_budget, budget);
  }
  for (std::size_t k = 0; k < kCoherencePairs.size(); ++k) {
    const auto [r, c] = kCoherencePairs[k];
    const auto& tr = final_state.term(static_cast<std::size_t>(r));
    const auto& tc = final_state.term(static_cast<std::size_t>(c));
    Complex factor{1.0};
    for (std::size_t e = 0; e < tr.env.size(); ++e) factor *= coherent_overlap(tc.env[e], tr.env[e]);
    report.env_coherence[k] = factor;
  }
  report.disentanglement_defect = bus_disentanglement_defect(final_state);
  fill_density_metrics(report, reduced_qubit_density(final_state),
                       target_vector(input->coeffs, target));
  return report;
}

MetricsReport gate_fidelity(const HybridState& final_state, const GateParams& params) {
  return gate_fidelity(final_state, utot_closed_form(params.beta1, params.beta2));
}

MetricsReport gate_fidelity(const fock::FockVector& final_state, const TwoQubitTarget& target) {
  if (final_state.qubits != 2) throw ShapeMismatch("gate_fidelity needs a two-qubit state");
  if (!final_state.input) throw MissingInputRecord("gate_fidelity: Fock state carries no input record");
  const auto& input = *final_state.input;

  MetricsReport report;
  std::vector<Complex> means;
  for (std::size_t b = 0; b < 4; ++b) {
    const Complex overlap = std::conj(input.coeffs[b]) * input.bus.dot(final_state.block(b));
    report.conditional_phases[b] = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
    if (input.coeffs[b] != Complex{}) means.push_back(fock::mean_amplitude(final_state, b));
  }
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      report.disentanglement_defect =
          std::max(report.disentanglement_defect, std::abs(means[i] - means[j]));
    }
  }
  report.env_coherence.fill(Complex{1.0});
  fill_density_metrics(report, fock::reduced_density(final_state),
                       target_vector(input.coeffs, target));
  return report;
}

MetricsReport gate_fidelity(const fock::FockVector& final_state, const GateParams& params) {
  return gate_fidelity(final_state, utot_closed_form(params.beta1, params.beta2));
}

double dephasing_exponent(double eta, Complex alpha, double theta, DephasingSchedule schedule,
                          bool compensate) {
  const Complex beta = 2.0 * alpha * std::sin(theta);
  const Complex applied = compensate ? compensate_amplitude(beta, eta) : beta;
  GateSequence seq;
  if (schedule == DephasingSchedule::kSingleDisplacement) {
    seq.add(CondDisp{applied, 0}, eta);
  } else {
    seq = build_utot(applied, applied, eta);
  }
  const std::array<Complex, 4> uniform{0.5, 0.5, 0.5, 0.5};
  const HybridState out = run_exact(seq, init_state(uniform, {}));
  const auto& first = out.term(0);
  const auto& last = out.term(3);
  // Sum of logs keeps tiny exponents exact where a product of overlaps would round.
  double exponent = 0.0;
  for (std::size_t k = 0; k < first.env.size(); ++k) {
    exponent += 0.5 * std::norm(first.env[k].amp - last.env[k].amp);
  }
  return exponent;
}

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need at least two paired points");
  }
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace qubus
