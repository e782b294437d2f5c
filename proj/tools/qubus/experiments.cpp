#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include "pool.hpp"
#include "qubus/qubus.hpp"

namespace qubus::cli {

bool Outcome::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

using Clock = std::chrono::steady_clock;
using Coeffs = std::array<Complex, 4>;

const char* const kBits[4] = {"00", "01", "10", "11"};

std::string num(double v) { return format_real(v); }
std::string num(Complex v) { return format_complex(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

// Wall-clock stopwatch that reads zero unless timing is enabled.
class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(Clock::now()) {}
  std::string elapsed_ms() const {
    if (!enabled_) return "0";
    return num(std::chrono::duration<double, std::milli>(Clock::now() - start_).count());
  }

 private:
  bool enabled_;
  Clock::time_point start_;
};

// Aggregates one scalar over rows into a check.
class Tally {
 public:
  enum class Kind { kMin, kMax };
  Tally(std::string name, Kind kind) : name_(std::move(name)), kind_(kind) {}
  void add(double v) {
    any_ = true;
    if (std::isnan(v)) nan_ = true;
    value_ = kind_ == Kind::kMin ? std::min(value_, v) : std::max(value_, v);
  }
  bool any() const { return any_; }
  double value() const { return value_; }
  // kMin passes when value >= limit, kMax when value <= limit.
  void emit(std::vector<Check>& checks, double limit) const {
    if (!any_) return;
    const bool ok = !nan_ && (kind_ == Kind::kMin ? value_ >= limit : value_ <= limit);
    checks.push_back({name_, value_, limit, ok});
  }

 private:
  std::string name_;
  Kind kind_;
  bool any_ = false;
  bool nan_ = false;
  double value_ = kind_ == Kind::kMin ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
};

// Portable uniform double in [-1, 1) from the raw engine output.
double symmetric_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

std::vector<Coeffs> make_inputs(const Config& c) {
  const auto kind = c.text("input.state");
  if (kind == "uniform") return {Coeffs{0.5, 0.5, 0.5, 0.5}};
  if (kind == "basis") {
    Coeffs v{};
    v[static_cast<std::size_t>(std::stoi(c.text("input.basis"), nullptr, 2))] = 1.0;
    return {v};
  }
  if (kind == "coeffs") {
    const auto given = c.complexes("input.coeffs");
    if (given.size() != 4) throw ConfigError("key 'input.coeffs': expected four coefficients");
    double norm = 0.0;
    for (const auto& z : given) norm += std::norm(z);
    if (!(norm > 0.0)) throw ConfigError("key 'input.coeffs': coefficients must not all vanish");
    return {Coeffs{given[0], given[1], given[2], given[3]}};
  }
  const long count = c.integer("input.count");
  if (count < 1) throw ConfigError("key 'input.count': need at least one random state");
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("seed")));
  std::vector<Coeffs> out;
  for (long k = 0; k < count; ++k) {
    Coeffs v;
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& z : v) {
        const double re = symmetric_unit(rng);
        z = {re, symmetric_unit(rng)};
        norm += std::norm(z);
      }
    } while (norm < 1e-6);
    for (auto& z : v) z /= std::sqrt(norm);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> backends_of(const Config& c) {
  const auto kind = c.text("backend.kind");
  if (kind == "both") return {"exact", "fock"};
  return {kind};
}

bool uses_fock(const Config& c) { return c.text("backend.kind") != "exact"; }

// Resolves the cutoff for a sequence; validation errors map to exit code 2.
int choose_cutoff(const Config& c, const GateSequence& seq, const HybridState& input) {
  if (c.text("backend.cutoff") != "auto") return static_cast<int>(c.integer("backend.cutoff"));
  const int n = fock::cutoff_rule(max_excursion(seq, input));
  const long cap = c.integer("backend.max_cutoff");
  if (n > cap) {
    throw ConfigError("Fock cutoff " + std::to_string(n) + " required by the largest branch excursion "
                      "exceeds backend.max_cutoff = " + std::to_string(cap) +
                      "; use backend.kind = exact for this regime");
  }
  return n;
}

double max_phase_error(const MetricsReport& report, const TwoQubitTarget& target, const Coeffs& in) {
  double worst = 0.0;
  for (std::size_t b = 0; b < 4; ++b) {
    if (in[b] == Complex{}) continue;
    worst = std::max(worst, std::abs(wrap_phase(report.conditional_phases[b] - std::arg(target.phases[b]))));
  }
  return worst;
}

void put_metrics(Row& row, const MetricsReport& r, const TwoQubitTarget& target, const Coeffs& in) {
  row["fidelity"] = num(r.two_qubit_fidelity);
  row["purity"] = num(r.purity);
  row["defect"] = num(r.disentanglement_defect);
  for (std::size_t b = 0; b < 4; ++b) row[std::string("phase_") + kBits[b]] = num(r.conditional_phases[b]);
  row["phase_error"] = num(max_phase_error(r, target, in));
  for (std::size_t k = 0; k < kCoherencePairs.size(); ++k) {
    const auto [i, j] = kCoherencePairs[k];
    row[std::string("coh_") + kBits[i] + "_" + kBits[j]] = num(r.coherence_magnitudes[k]);
  }
  row["env_budget"] = num(r.env_photon_budget);
}

std::vector<Column> metric_columns() {
  std::vector<Column> cols = {
      {"fidelity", "<target|rho|target> of the reduced two-qubit state"},
      {"purity", "Tr rho^2 of the reduced two-qubit state"},
      {"defect", "largest bus amplitude difference between branches (loop closure)"},
  };
  for (const auto* b : kBits) {
    cols.push_back({std::string("phase_") + b, std::string("conditional phase of branch ") + b + " (rad)"});
  }
  cols.push_back({"phase_error", "largest |phase - target phase| over populated branches (rad)"});
  for (const auto& [i, j] : kCoherencePairs) {
    cols.push_back({std::string("coh_") + kBits[i] + "_" + kBits[j],
                    std::string("|rho_") + kBits[i] + "," + kBits[j] + "| of the reduced density"});
  }
  cols.push_back({"env_budget", "largest environment photon number over branches"});
  return cols;
}

Column leakage_column() {
  return {"leakage", "Fock truncation leakage (norm loss or guard-band weight); 0 for exact rows"};
}
Column runtime_column() {
  return {"runtime_ms", "wall-clock time of the point in ms; 0 unless output.timing = true"};
}

// Fock evolution of a lossless exact-backend input, with an optional rerun at twice the cutoff.
struct FockRun {
  fock::EvolveResult result;
  std::optional<double> doubled_fidelity;
};

FockRun run_fock(const GateSequence& seq, const HybridState& input, int cutoff,
                 const TwoQubitTarget& target, bool convergence) {
  FockRun run{fock::evolve(seq, fock::from_hybrid(input, cutoff)), std::nullopt};
  if (convergence) {
    const auto doubled = fock::evolve(seq, fock::from_hybrid(input, 2 * cutoff));
    run.doubled_fidelity = gate_fidelity(doubled.state, target).two_qubit_fidelity;
  }
  return run;
}

std::vector<double> single_or_list(const Config& c, const std::string& key, bool sweep_allowed,
                                   bool applies, const std::string& why) {
  auto values = c.reals(key);
  if (values.size() > 1 && !sweep_allowed) {
    throw ConfigError("key '" + key + "': gate-check takes a single value; use the sweep experiment");
  }
  if (values.size() > 1 && !applies) throw ConfigError("key '" + key + "': a list only applies " + why);
  if (!applies) values.resize(1);
  return values;
}

// ---------------------------------------------------------------------------
// gate-check and sweep: grid over theta x chi x eta x input x backend.

class GateGrid : public Experiment {
 public:
  GateGrid(const Config& c, bool sweep) : c_(c) {
    mode_ = c.text("gate.mode");
    beta1_ = c.complex("gate.beta1");
    beta2_ = c.complex("gate.beta2");
    thetas_ = single_or_list(c, "gate.theta", sweep, mode_ == "rotations", "in rotations mode");
    chis_ = single_or_list(c, "gate.chi", sweep, mode_ == "drive", "in drive mode");
    etas_ = single_or_list(c, "loss.eta", sweep, true, "");
    inputs_ = make_inputs(c);
    backends_ = backends_of(c);
    target_ = utot_closed_form(beta1_, beta2_);
    bus_amp_ = c.complex("input.bus_amp");

    for (double eta : etas_) {
      if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("key 'loss.eta': values must lie in [0, 1)");
      if (eta > 0.0 && uses_fock(c)) {
        throw ConfigError("key 'loss.eta': the Fock backend has no loss model for full gates; "
                          "use backend.kind = exact (loss-scan runs the two-mode Fock check)");
      }
      if (eta > 0.0 && mode_ == "drive") {
        throw ConfigError("key 'loss.eta': loss attaches to conditional displacements, not drive pulses");
      }
    }
    for (double theta : thetas_) {
      for (double chi : chis_) {
        for (double eta : etas_) {
          try {
            sequences_.push_back(build(theta, chi, eta));
          } catch (const InfeasibleParams& e) {
            throw ConfigError(std::string("key 'gate.theta': ") + e.what());
          } catch (const DegenerateCoupling& e) {
            throw ConfigError(std::string("key 'gate.chi': ") + e.what());
          } catch (const NoSolutionFound& e) {
            throw ConfigError(std::string("gate.mode = drive: ") + e.what());
          }
        }
      }
    }
    // Cutoffs are fixed up front so a missing Fock budget is a validation error.
    if (uses_fock(c)) {
      for (const auto& seq : sequences_) {
        int worst = 0;
        for (const auto& in : inputs_) worst = std::max(worst, choose_cutoff(c, seq, init_state(in, bus_amp_)));
        cutoffs_.push_back(worst);
      }
    }
  }

  Outcome run(unsigned threads) const override {
    Outcome out;
    out.columns = {
        {"point", "grid index"},
        {"backend", "exact or fock"},
        {"mode", "gate construction (gate.mode)"},
        {"theta", "conditional rotation angle; empty unless mode = rotations"},
        {"chi", "dispersive coupling; empty unless mode = drive"},
        {"alpha1", "displacement amplitude of qubit 1 slots; empty unless mode = rotations"},
        {"alpha2", "displacement amplitude of qubit 2 slots; empty unless mode = rotations"},
        {"beta1", "target conditional displacement of qubit 1"},
        {"beta2", "target conditional displacement of qubit 2"},
        {"eta", "loss reflectivity per conditional displacement"},
        {"compensate", "1 when displacements were pre-scaled against loss"},
        {"input", "input state index (seeded order)"},
        {"cutoff", "Fock cutoff; 0 for exact rows"},
    };
    const auto metrics = metric_columns();
    out.columns.insert(out.columns.end(), metrics.begin(), metrics.end());
    out.columns.push_back(leakage_column());
    out.columns.push_back({"convergence", "|fidelity(2N) - fidelity(N)|; empty unless backend.convergence"});
    out.columns.push_back(runtime_column());

    struct Point {
      std::size_t seq;
      double theta, chi, eta;
      std::size_t input;
      std::string backend;
    };
    std::vector<Point> points;
    std::size_t s = 0;
    for (double theta : thetas_) {
      for (double chi : chis_) {
        for (double eta : etas_) {
          for (std::size_t i = 0; i < inputs_.size(); ++i) {
            for (const auto& b : backends_) points.push_back({s, theta, chi, eta, i, b});
          }
          ++s;
        }
      }
    }

    const bool timing = c_.flag("output.timing");
    const bool convergence = c_.flag("backend.convergence");
    const bool compensate = c_.flag("loss.compensate");
    out.rows = parallel_map<Row>(points.size(), threads, [&](std::size_t k) {
      const auto& p = points[k];
      Stopwatch clock(timing);
      const auto& seq = sequences_[p.seq];
      const auto& coeffs = inputs_[p.input];
      const auto input = init_state(coeffs, bus_amp_);
      Row row;
      row["point"] = num(k);
      row["backend"] = p.backend;
      row["mode"] = mode_;
      if (mode_ == "rotations") {
        row["theta"] = num(p.theta);
        row["alpha1"] = num(alpha_for(beta1_, p.theta));
        row["alpha2"] = num(alpha_for(beta2_, p.theta));
      }
      if (mode_ == "drive") row["chi"] = num(p.chi);
      row["beta1"] = num(beta1_);
      row["beta2"] = num(beta2_);
      row["eta"] = num(p.eta);
      row["compensate"] = compensate ? "1" : "0";
      row["input"] = num(p.input);
      if (p.backend == "exact") {
        put_metrics(row, gate_fidelity(run_exact(seq, input), target_), target_, coeffs);
        row["cutoff"] = "0";
        row["leakage"] = "0";
      } else {
        const int cutoff = cutoffs_[p.seq];
        const auto fr = run_fock(seq, input, cutoff, target_, convergence);
        const auto report = gate_fidelity(fr.result.state, target_);
        put_metrics(row, report, target_, coeffs);
        row["cutoff"] = num(cutoff);
        row["leakage"] = num(fr.result.leakage());
        if (fr.doubled_fidelity) {
          row["convergence"] = num(std::abs(*fr.doubled_fidelity - report.two_qubit_fidelity));
        }
      }
      row["runtime_ms"] = clock.elapsed_ms();
      return row;
    });

    Tally exact_fid("exact_min_fidelity", Tally::Kind::kMin);
    Tally exact_defect("exact_max_defect", Tally::Kind::kMax);
    Tally exact_phase("exact_max_phase_error", Tally::Kind::kMax);
    Tally fock_fid("fock_min_fidelity", Tally::Kind::kMin);
    Tally fock_conv("fock_max_convergence", Tally::Kind::kMax);
    Tally fock_leak("fock_max_leakage", Tally::Kind::kMax);
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& row = out.rows[k];
      const auto& p = points[k];
      const bool lossless = p.eta == 0.0;
      if (p.backend == "exact") {
        if (lossless) exact_fid.add(parse_real(row.at("fidelity")));
        if (lossless || compensate) {
          exact_defect.add(parse_real(row.at("defect")));
          exact_phase.add(parse_real(row.at("phase_error")));
        }
      } else {
        fock_fid.add(parse_real(row.at("fidelity")));
        fock_leak.add(parse_real(row.at("leakage")));
        if (row.count("convergence")) fock_conv.add(parse_real(row.at("convergence")));
      }
    }
    exact_fid.emit(out.checks, 1.0 - c_.real("tolerance.fidelity"));
    exact_defect.emit(out.checks, c_.real("tolerance.defect"));
    exact_phase.emit(out.checks, c_.real("tolerance.phase"));
    fock_fid.emit(out.checks, 1.0 - c_.real("tolerance.fock_fidelity"));
    fock_conv.emit(out.checks, c_.real("tolerance.convergence"));
    if (c_.flag("run.strict")) fock_leak.emit(out.checks, c_.real("tolerance.leakage"));
    if (fock_leak.any()) out.extra["fock_max_leakage"] = fock_leak.value();

    out.extra["target_conditional_phase"] = target_.conditional_phase;
    if (mode_ == "drive") {
      nlohmann::json schedules = nlohmann::json::array();
      std::size_t idx = 0;
      for (double chi : chis_) {
        for (std::size_t e = 0; e < etas_.size(); ++e, ++idx) {
          schedules.push_back({{"chi", chi}, {"sequence", serialize(sequences_[idx])}});
        }
      }
      out.extra["schedules"] = schedules;
    }
    return out;
  }

 private:
  GateSequence build(double theta, double chi, double eta) const {
    if (eta > 0.0) {
      const bool compensate = c_.flag("loss.compensate");
      const Complex b1 = compensate ? compensate_amplitude(beta1_, eta) : beta1_;
      const Complex b2 = compensate ? compensate_amplitude(beta2_, eta) : beta2_;
      return build_utot(b1, b2, eta);
    }
    if (mode_ == "rotations") return build_two_qubit_gate_for(beta1_, beta2_, theta, theta).sequence;
    if (mode_ == "displacements") return build_utot(beta1_, beta2_);
    const double phase = 2.0 * std::real(std::conj(beta1_) * beta2_);
    return solve_eight_op_schedule(phase, chi, c_.real("gate.eps_max")).sequence;
  }

  Config c_;
  std::string mode_;
  Complex beta1_, beta2_, bus_amp_;
  std::vector<double> thetas_, chis_, etas_;
  std::vector<Coeffs> inputs_;
  std::vector<std::string> backends_;
  std::vector<GateSequence> sequences_;
  std::vector<int> cutoffs_;
  TwoQubitTarget target_;
};

// ---------------------------------------------------------------------------
// loss-scan: dephasing exponent over eta x alpha sin(theta).

class LossScan : public Experiment {
 public:
  explicit LossScan(const Config& c) : c_(c) {
    etas_ = c.reals("loss.eta");
    products_ = c.reals("loss.alpha_sin_theta");
    theta_ = c.real("loss.theta");
    if (std::sin(theta_) == 0.0) throw ConfigError("key 'loss.theta': sin(theta) must be nonzero");
    for (double eta : etas_) {
      if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("key 'loss.eta': loss-scan needs values in (0, 1)");
    }
    for (double p : products_) {
      if (!(p > 0.0)) throw ConfigError("key 'loss.alpha_sin_theta': values must be positive");
    }
    const double comp = c.real("loss.compensation_eta");
    const double two_mode = c.real("loss.two_mode_eta");
    if (!(comp >= 0.0 && comp < 1.0)) throw ConfigError("key 'loss.compensation_eta': must lie in [0, 1)");
    if (!(two_mode >= 0.0 && two_mode < 1.0)) throw ConfigError("key 'loss.two_mode_eta': must lie in [0, 1)");
    if (c.integer("loss.two_mode_cutoff") < 2) throw ConfigError("key 'loss.two_mode_cutoff': must be >= 2");
    inputs_ = make_inputs(c);
  }

  Outcome run(unsigned threads) const override {
    Outcome out;
    out.columns = {
        {"point", "grid index"},
        {"eta", "loss reflectivity per conditional displacement"},
        {"alpha_sin_theta", "alpha sin(theta)"},
        {"alpha", "displacement amplitude alpha_sin_theta / sin(theta)"},
        {"theta", "conditional rotation angle"},
        {"schedule", "full-gate (four displacements) or single"},
        {"compensate", "1 when displacements were pre-scaled against loss"},
        {"input", "input state index (seeded order)"},
        {"exponent", "-ln|coherence factor| between branches 00 and 11 from the environment"},
        {"ratio", "exponent / (eta^2 alpha^2 sin^2 theta)"},
    };
    const auto metrics = metric_columns();
    out.columns.insert(out.columns.end(), metrics.begin(), metrics.end());
    out.columns.push_back(leakage_column());
    out.columns.push_back(runtime_column());

    struct Point {
      double eta, product;
      std::size_t input;
    };
    std::vector<Point> points;
    for (double product : products_) {
      for (double eta : etas_) {
        for (std::size_t i = 0; i < inputs_.size(); ++i) points.push_back({eta, product, i});
      }
    }
    const bool timing = c_.flag("output.timing");
    const bool compensate = c_.flag("loss.compensate");
    const auto schedule = c_.text("loss.schedule") == "single" ? DephasingSchedule::kSingleDisplacement
                                                                : DephasingSchedule::kFullGate;
    const Complex bus_amp = c_.complex("input.bus_amp");
    std::vector<double> exponents(points.size());
    out.rows = parallel_map<Row>(points.size(), threads, [&](std::size_t k) {
      const auto& p = points[k];
      Stopwatch clock(timing);
      const double alpha = p.product / std::sin(theta_);
      const double exponent = dephasing_exponent(p.eta, alpha, theta_, schedule, compensate);
      exponents[k] = exponent;
      // The gate whose displacements are beta = 2 alpha sin(theta) on both qubits.
      const Complex beta = 2.0 * p.product;
      const Complex applied = compensate ? compensate_amplitude(beta, p.eta) : beta;
      GateSequence seq;
      if (schedule == DephasingSchedule::kSingleDisplacement) {
        seq.add(CondDisp{applied, 0}, p.eta);
      } else {
        seq = build_utot(applied, applied, p.eta);
      }
      const auto target = schedule == DephasingSchedule::kSingleDisplacement ? phase_target(0.0)
                                                                             : utot_closed_form(beta, beta);
      const auto& coeffs = inputs_[p.input];
      Row row;
      row["point"] = num(k);
      row["eta"] = num(p.eta);
      row["alpha_sin_theta"] = num(p.product);
      row["alpha"] = num(alpha);
      row["theta"] = num(theta_);
      row["schedule"] = c_.text("loss.schedule");
      row["compensate"] = compensate ? "1" : "0";
      row["input"] = num(p.input);
      row["exponent"] = num(exponent);
      row["ratio"] = num(exponent / (p.eta * p.eta * p.product * p.product));
      put_metrics(row, gate_fidelity(run_exact(seq, init_state(coeffs, bus_amp)), target), target, coeffs);
      row["leakage"] = "0";
      row["runtime_ms"] = clock.elapsed_ms();
      return row;
    });

    // Slope of ln(exponent) against ln(eta) per alpha sin(theta).
    const double slope_tol = c_.real("tolerance.slope");
    nlohmann::json fits = nlohmann::json::array();
    double worst_slope = 0.0;
    std::vector<double> ratios;
    for (double product : products_) {
      std::vector<double> xs, ys;
      for (std::size_t k = 0; k < points.size(); ++k) {
        if (points[k].product != product || points[k].input != 0) continue;
        xs.push_back(points[k].eta);
        ys.push_back(exponents[k]);
        ratios.push_back(exponents[k] / (points[k].eta * points[k].eta * product * product));
      }
      if (xs.size() >= 2) {
        const double slope = fit_loglog_slope(xs, ys);
        fits.push_back({{"alpha_sin_theta", product}, {"slope", slope}});
        worst_slope = std::max(worst_slope, std::abs(slope - 2.0));
      }
    }
    out.extra["slope_fits"] = fits;
    if (!fits.empty()) out.checks.push_back({"max_abs_slope_minus_2", worst_slope, slope_tol, worst_slope <= slope_tol});
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    double mean = 0.0;
    for (double r : ratios) mean += r / static_cast<double>(ratios.size());
    const double spread = (*hi - *lo) / mean;
    out.extra["ratio_mean"] = mean;
    out.extra["ratio_min"] = *lo;
    out.extra["ratio_max"] = *hi;
    out.checks.push_back({"ratio_relative_spread", spread, c_.real("tolerance.ratio_spread"),
                          spread <= c_.real("tolerance.ratio_spread")});

    // Compensation restores the lossless conditional phases.
    {
      const double eta = c_.real("loss.compensation_eta");
      const Complex b1 = c_.complex("gate.beta1");
      const Complex b2 = c_.complex("gate.beta2");
      const auto seq = build_utot(compensate_amplitude(b1, eta), compensate_amplitude(b2, eta), eta);
      const auto target = utot_closed_form(b1, b2);
      const Coeffs uniform{0.5, 0.5, 0.5, 0.5};
      const auto report = gate_fidelity(run_exact(seq, init_state(uniform, 0.0)), target);
      const double err = max_phase_error(report, target, uniform);
      out.extra["compensation"] = {{"eta", eta},
                                   {"phase_error", err},
                                   {"defect", report.disentanglement_defect},
                                   {"fidelity", report.two_qubit_fidelity}};
      out.checks.push_back({"compensation_phase_error", err, c_.real("tolerance.phase"),
                            err <= c_.real("tolerance.phase")});
      out.checks.push_back({"compensation_defect", report.disentanglement_defect, c_.real("tolerance.defect"),
                            report.disentanglement_defect <= c_.real("tolerance.defect")});
    }

    // One lossy displacement in a two-mode Fock model against the exact overlaps.
    if (uses_fock(c_)) {
      const double eta = c_.real("loss.two_mode_eta");
      const int cutoff = static_cast<int>(c_.integer("loss.two_mode_cutoff"));
      const Complex beta = c_.complex("gate.beta1");
      const auto input = init_state(inputs_.front(), 0.0);
      const auto exact = reduced_qubit_density(apply_lossy_cond_disp(input, beta, 0, eta));
      const auto fock = fock::two_mode_lossy_density(input, beta, 0, eta, cutoff);
      const double dev = (exact - fock).cwiseAbs().maxCoeff();
      out.extra["two_mode_check"] = {{"eta", eta}, {"cutoff", cutoff}, {"max_deviation", dev}};
      out.checks.push_back({"two_mode_max_deviation", dev, c_.real("tolerance.two_mode"),
                            dev <= c_.real("tolerance.two_mode")});
    }
    return out;
  }

 private:
  Config c_;
  std::vector<double> etas_, products_;
  double theta_ = 0.0;
  std::vector<Coeffs> inputs_;
};

// ---------------------------------------------------------------------------
// fock-compare: joint-state agreement between the exact and Fock backends.

class FockCompareGate : public Experiment {
 public:
  explicit FockCompareGate(const Config& c) : c_(c) {
    if (c.text("backend.kind") != "both") {
      throw ConfigError("key 'backend.kind': fock-compare needs both backends");
    }
    for (double eta : c.reals("loss.eta")) {
      if (eta != 0.0) throw ConfigError("key 'loss.eta': fock-compare runs lossless gates only");
    }
    mode_ = c.text("gate.mode");
    beta1_ = c.complex("gate.beta1");
    beta2_ = c.complex("gate.beta2");
    thetas_ = single_or_list(c, "gate.theta", true, mode_ == "rotations", "in rotations mode");
    inputs_ = make_inputs(c);
    bus_amp_ = c.complex("input.bus_amp");
    target_ = utot_closed_form(beta1_, beta2_);
    for (double theta : thetas_) {
      try {
        if (mode_ == "rotations") {
          sequences_.push_back(build_two_qubit_gate_for(beta1_, beta2_, theta, theta).sequence);
        } else if (mode_ == "displacements") {
          sequences_.push_back(build_utot(beta1_, beta2_));
        } else {
          const double phase = 2.0 * std::real(std::conj(beta1_) * beta2_);
          sequences_.push_back(
              solve_eight_op_schedule(phase, c.reals("gate.chi").front(), c.real("gate.eps_max")).sequence);
        }
      } catch (const Error& e) {
        throw ConfigError(std::string("gate parameters: ") + e.what());
      }
      int worst = 0;
      for (const auto& in : inputs_) {
        worst = std::max(worst, choose_cutoff(c, sequences_.back(), init_state(in, bus_amp_)));
      }
      cutoffs_.push_back(worst);
    }
  }

  Outcome run(unsigned threads) const override {
    Outcome out;
    out.columns = {
        {"point", "grid index"},
        {"mode", "gate construction (gate.mode)"},
        {"theta", "conditional rotation angle; empty unless mode = rotations"},
        {"beta1", "target conditional displacement of qubit 1"},
        {"beta2", "target conditional displacement of qubit 2"},
        {"input", "input state index (seeded order)"},
        {"cutoff", "Fock cutoff"},
        {"exact_fidelity", "exact-backend gate fidelity"},
        {"agreement", "|<psi_exact|psi_fock>|^2 of the joint qubit-bus states"},
    };
    const auto metrics = metric_columns();
    out.columns.insert(out.columns.end(), metrics.begin(), metrics.end());
    out.columns.push_back(leakage_column());
    out.columns.push_back({"convergence", "|fidelity(2N) - fidelity(N)|; empty unless backend.convergence"});
    out.columns.push_back(runtime_column());

    std::vector<std::pair<std::size_t, std::size_t>> points;
    for (std::size_t s = 0; s < thetas_.size(); ++s) {
      for (std::size_t i = 0; i < inputs_.size(); ++i) points.emplace_back(s, i);
    }
    const bool timing = c_.flag("output.timing");
    const bool convergence = c_.flag("backend.convergence");
    out.rows = parallel_map<Row>(points.size(), threads, [&](std::size_t k) {
      const auto [s, i] = points[k];
      Stopwatch clock(timing);
      const auto input = init_state(inputs_[i], bus_amp_);
      const int cutoff = cutoffs_[s];
      const auto exact = run_exact(sequences_[s], input);
      const auto fr = run_fock(sequences_[s], input, cutoff, target_, convergence);
      const auto report = gate_fidelity(fr.result.state, target_);
      Row row;
      row["point"] = num(k);
      row["mode"] = mode_;
      if (mode_ == "rotations") row["theta"] = num(thetas_[s]);
      row["beta1"] = num(beta1_);
      row["beta2"] = num(beta2_);
      row["input"] = num(i);
      row["cutoff"] = num(cutoff);
      row["exact_fidelity"] = num(gate_fidelity(exact, target_).two_qubit_fidelity);
      row["agreement"] = num(fock::state_fidelity(fock::from_hybrid(exact, cutoff).amps, fr.result.state.amps));
      put_metrics(row, report, target_, inputs_[i]);
      row["leakage"] = num(fr.result.leakage());
      if (fr.doubled_fidelity) row["convergence"] = num(std::abs(*fr.doubled_fidelity - report.two_qubit_fidelity));
      row["runtime_ms"] = clock.elapsed_ms();
      return row;
    });

    Tally agreement("min_agreement", Tally::Kind::kMin);
    Tally fid("fock_min_fidelity", Tally::Kind::kMin);
    Tally conv("fock_max_convergence", Tally::Kind::kMax);
    Tally leak("fock_max_leakage", Tally::Kind::kMax);
    for (const auto& row : out.rows) {
      agreement.add(parse_real(row.at("agreement")));
      fid.add(parse_real(row.at("fidelity")));
      leak.add(parse_real(row.at("leakage")));
      if (row.count("convergence")) conv.add(parse_real(row.at("convergence")));
    }
    const double tol = c_.real("tolerance.fock_fidelity");
    agreement.emit(out.checks, 1.0 - tol);
    fid.emit(out.checks, 1.0 - tol);
    conv.emit(out.checks, c_.real("tolerance.convergence"));
    if (c_.flag("run.strict")) leak.emit(out.checks, c_.real("tolerance.leakage"));
    out.extra["fock_max_leakage"] = leak.value();
    return out;
  }

 private:
  Config c_;
  std::string mode_;
  Complex beta1_, beta2_, bus_amp_;
  std::vector<double> thetas_;
  std::vector<Coeffs> inputs_;
  std::vector<GateSequence> sequences_;
  std::vector<int> cutoffs_;
  TwoQubitTarget target_;
};

// Drive composite: U(eps, +chi sz) then U(eps, -chi sz) on qubit 1 in |+>.
class FockCompareDrive : public Experiment {
 public:
  explicit FockCompareDrive(const Config& c) : c_(c) {
    eps_ = c.reals("fock.eps");
    chis_ = c.reals("fock.chi");
    ts_ = c.reals("fock.t");
    for (double chi : chis_) {
      if (chi == 0.0) throw ConfigError("key 'fock.chi': values must be nonzero");
    }
    for (double t : ts_) {
      if (t < 0.0) throw ConfigError("key 'fock.t': durations must be non-negative");
    }
    for (double e : eps_) {
      for (double chi : chis_) {
        for (double t : ts_) {
          points_.push_back({e, chi, t});
          cutoffs_.push_back(choose_cutoff(c, composite(e, chi, t), plus_state()));
        }
      }
    }
  }

  Outcome run(unsigned threads) const override {
    Outcome out;
    out.columns = {
        {"point", "grid index"},
        {"eps", "drive amplitude"},
        {"chi", "dispersive coupling"},
        {"t", "duration of each half of the composite"},
        {"cutoff", "Fock cutoff"},
        {"disp_plus", "exact bus displacement on the sz = +1 branch"},
        {"disp_minus", "exact bus displacement on the sz = -1 branch"},
        {"conditional", "sz-odd part of the composite displacement"},
        {"unconditional", "sz-even part of the composite displacement"},
        {"fidelity", "|<psi_exact|psi_fock>|^2 of the joint qubit-bus state from |+>|0>"},
        leakage_column(),
        runtime_column(),
    };
    const bool timing = c_.flag("output.timing");
    out.rows = parallel_map<Row>(points_.size(), threads, [&](std::size_t k) {
      const auto [e, chi, t] = points_[k];
      Stopwatch clock(timing);
      const auto seq = composite(e, chi, t);
      const int cutoff = cutoffs_[k];
      const auto exact = run_exact(seq, plus_state());
      const auto fr = fock::evolve(seq, fock::from_hybrid(plus_state(), cutoff));
      const auto op = drive_composite(e, chi, t, 0);
      const auto parts = composite_components(e, chi, t);
      Row row;
      row["point"] = num(k);
      row["eps"] = num(e);
      row["chi"] = num(chi);
      row["t"] = num(t);
      row["cutoff"] = num(cutoff);
      row["disp_plus"] = num(op.on_plus.disp);
      row["disp_minus"] = num(op.on_minus.disp);
      row["conditional"] = num(parts.conditional);
      row["unconditional"] = num(parts.unconditional);
      row["fidelity"] = num(fock::state_fidelity(fock::from_hybrid(exact, cutoff).amps, fr.state.amps));
      row["leakage"] = num(fr.leakage());
      row["runtime_ms"] = clock.elapsed_ms();
      return row;
    });

    Tally fid("min_fidelity", Tally::Kind::kMin);
    Tally leak("max_leakage", Tally::Kind::kMax);
    for (const auto& row : out.rows) {
      fid.add(parse_real(row.at("fidelity")));
      leak.add(parse_real(row.at("leakage")));
    }
    fid.emit(out.checks, 1.0 - c_.real("tolerance.fock_fidelity"));
    if (c_.flag("run.strict")) leak.emit(out.checks, c_.real("tolerance.leakage"));

    // Informational only: the commonly quoted small chi*t form against the exact composite.
    nlohmann::json report = nlohmann::json::array();
    for (double t : c_.reals("fock.report_t")) {
      const auto r = small_coupling_report(1.0, 1.0, t);
      report.push_back({{"eps", r.eps},
                        {"chi", r.chi},
                        {"t", r.t},
                        {"exact_conditional", format_complex(r.exact_conditional)},
                        {"exact_unconditional", format_complex(r.exact_unconditional)},
                        {"leading_conditional", format_complex(r.leading_conditional)},
                        {"leading_unconditional", format_complex(r.leading_unconditional)},
                        {"naive_conditional", format_complex(r.naive_conditional)},
                        {"conditional_mismatch", r.conditional_mismatch},
                        {"text", r.describe()}});
    }
    out.extra["small_coupling_report"] = report;
    return out;
  }

 private:
  struct Point {
    double eps, chi, t;
  };
  static GateSequence composite(double e, double chi, double t) {
    GateSequence seq;
    seq.add(DrivePulse{e, 0.0, +1, t, chi, 0});
    seq.add(DrivePulse{e, 0.0, -1, t, chi, 0});
    return seq;
  }
  static HybridState plus_state() {
    const Complex h = 1.0 / std::sqrt(2.0);
    const std::array<Complex, 2> c{h, h};
    return init_state(c, 0.0);
  }

  Config c_;
  std::vector<double> eps_, chis_, ts_;
  std::vector<Point> points_;
  std::vector<int> cutoffs_;
};

// ---------------------------------------------------------------------------
// solve-schedule: eight-pulse drive schedules over target phase x chi.

class SolveSchedule : public Experiment {
 public:
  explicit SolveSchedule(const Config& c) : c_(c) {
    targets_ = c.reals("gate.target_phase");
    chis_ = c.reals("gate.chi");
    eps_max_ = c.real("gate.eps_max");
    if (!(eps_max_ > 0.0)) throw ConfigError("key 'gate.eps_max': must be positive");
    for (double chi : chis_) {
      if (chi == 0.0) throw ConfigError("key 'gate.chi': values must be nonzero");
    }
    const auto inputs = make_inputs(c);
    input_ = inputs.front();
    bus_amp_ = c.complex("input.bus_amp");
  }

  Outcome run(unsigned threads) const override {
    Outcome out;
    out.columns = {
        {"point", "grid index"},
        {"target_phase", "requested conditional phase (rad)"},
        {"chi", "dispersive coupling"},
        {"eps_max", "drive amplitude bound"},
        {"solved", "1 when the solver reached its tolerance"},
        {"pulses", "number of drive pulses"},
        {"iterations", "solver iterations"},
        {"residual", "max-abs solver residual"},
        {"closure", "largest residual bus displacement or rotation over branches"},
        {"max_eps", "largest |eps| in the schedule"},
        {"total_time", "summed pulse durations"},
        {"cutoff", "Fock cutoff; 0 when the Fock backend is off"},
        {"fock_fidelity", "Fock-backend gate fidelity; empty when the Fock backend is off"},
    };
    const auto metrics = metric_columns();
    out.columns.insert(out.columns.end(), metrics.begin(), metrics.end());
    out.columns.push_back(leakage_column());
    out.columns.push_back(runtime_column());

    std::vector<std::pair<double, double>> points;
    for (double target : targets_) {
      for (double chi : chis_) points.emplace_back(target, chi);
    }
    const bool timing = c_.flag("output.timing");
    const bool fock_on = uses_fock(c_);
    std::vector<std::string> serialized(points.size());
    out.rows = parallel_map<Row>(points.size(), threads, [&](std::size_t k) {
      const auto [target_phase, chi] = points[k];
      Stopwatch clock(timing);
      Row row;
      row["point"] = num(k);
      row["target_phase"] = num(target_phase);
      row["chi"] = num(chi);
      row["eps_max"] = num(eps_max_);
      EightPulseSchedule sched;
      try {
        sched = solve_eight_op_schedule(target_phase, chi, eps_max_);
      } catch (const NoSolutionFound& e) {
        row["solved"] = "0";
        row["residual"] = num(e.best_residual());
        row["runtime_ms"] = clock.elapsed_ms();
        return row;
      }
      serialized[k] = serialize(sched.sequence);
      row["solved"] = "1";
      row["pulses"] = num(sched.sequence.size());
      row["iterations"] = num(sched.iterations);
      row["residual"] = num(sched.residual);
      double closure = 0.0;
      for (const auto& op : branch_compositions(sched.sequence, 2)) {
        closure = std::max({closure, std::abs(op.disp), std::abs(op.rot)});
      }
      row["closure"] = num(closure);
      double max_eps = 0.0, total = 0.0;
      for (const auto& p : sched.sequence.primitives()) {
        const auto& pulse = std::get<DrivePulse>(p.op);
        max_eps = std::max(max_eps, std::abs(pulse.eps));
        total += pulse.duration;
      }
      row["max_eps"] = num(max_eps);
      row["total_time"] = num(total);
      const auto target = phase_target(target_phase);
      const auto input = init_state(input_, bus_amp_);
      put_metrics(row, gate_fidelity(run_exact(sched.sequence, input), target), target, input_);
      row["cutoff"] = "0";
      row["leakage"] = "0";
      if (fock_on) {
        const int cutoff = choose_cutoff(c_, sched.sequence, input);
        const auto fr = fock::evolve(sched.sequence, fock::from_hybrid(input, cutoff));
        row["cutoff"] = num(cutoff);
        row["fock_fidelity"] = num(gate_fidelity(fr.state, target).two_qubit_fidelity);
        row["leakage"] = num(fr.leakage());
      }
      row["runtime_ms"] = clock.elapsed_ms();
      return row;
    });

    Tally solved("min_solved", Tally::Kind::kMin);
    Tally closure("max_closure", Tally::Kind::kMax);
    Tally fid("exact_min_fidelity", Tally::Kind::kMin);
    Tally phase("exact_max_phase_error", Tally::Kind::kMax);
    Tally fock_fid("fock_min_fidelity", Tally::Kind::kMin);
    Tally leak("fock_max_leakage", Tally::Kind::kMax);
    nlohmann::json schedules = nlohmann::json::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& row = out.rows[k];
      solved.add(row.at("solved") == "1" ? 1.0 : 0.0);
      if (row.at("solved") != "1") continue;
      closure.add(parse_real(row.at("closure")));
      fid.add(parse_real(row.at("fidelity")));
      phase.add(parse_real(row.at("phase_error")));
      if (row.count("fock_fidelity")) {
        fock_fid.add(parse_real(row.at("fock_fidelity")));
        leak.add(parse_real(row.at("leakage")));
      }
      schedules.push_back({{"target_phase", points[k].first}, {"chi", points[k].second}, {"sequence", serialized[k]}});
    }
    solved.emit(out.checks, 1.0);
    closure.emit(out.checks, c_.real("tolerance.closure"));
    fid.emit(out.checks, 1.0 - c_.real("tolerance.fidelity"));
    phase.emit(out.checks, c_.real("tolerance.phase"));
    fock_fid.emit(out.checks, 1.0 - c_.real("tolerance.fock_fidelity"));
    if (c_.flag("run.strict")) leak.emit(out.checks, c_.real("tolerance.leakage"));
    out.extra["schedules"] = schedules;
    return out;
  }

 private:
  Config c_;
  std::vector<double> targets_, chis_;
  double eps_max_ = 0.0;
  Coeffs input_{};
  Complex bus_amp_;
};

}  // namespace

std::unique_ptr<Experiment> plan_experiment(const Config& config) {
  const auto name = config.text("experiment");
  if (name == "gate-check") return std::make_unique<GateGrid>(config, false);
  if (name == "sweep") return std::make_unique<GateGrid>(config, true);
  if (name == "loss-scan") return std::make_unique<LossScan>(config);
  if (name == "fock-compare") {
    if (config.text("fock.target") == "drive") return std::make_unique<FockCompareDrive>(config);
    return std::make_unique<FockCompareGate>(config);
  }
  return std::make_unique<SolveSchedule>(config);
}

}  // namespace qubus::cli
