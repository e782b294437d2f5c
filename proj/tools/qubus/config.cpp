#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qubus/errors.hpp"
#include "qubus/text.hpp"

namespace qubus::cli {

namespace {

using VT = ValueType;

const std::vector<KeySpec> kKeys = {
    {"experiment", VT::kEnum, "gate-check", "gate-check|sweep|loss-scan|fock-compare|solve-schedule",
     "experiment to run; the command-line positional overrides it"},
    {"preset", VT::kString, "", "", "named base configuration applied before file keys"},
    {"seed", VT::kInt, "1", "", "seed for random input states"},
    {"run.threads", VT::kInt, "0", "", "worker threads; 0 uses the hardware concurrency"},
    {"run.strict", VT::kBool, "false", "", "fail (exit 3) when any Fock run exceeds tolerance.leakage"},

    {"gate.mode", VT::kEnum, "rotations", "rotations|displacements|drive",
     "how the gate is built: rotations + unconditional displacements, direct conditional "
     "displacements, or the solved eight-pulse drive schedule"},
    {"gate.beta1", VT::kComplex, "0.62665706865775006", "", "conditional displacement on qubit 1"},
    {"gate.beta2", VT::kComplex, "0.62665706865775006", "", "conditional displacement on qubit 2"},
    {"gate.theta", VT::kRealList, "1.5707963267948966", "",
     "conditional rotation angle (rotations mode); a list sweeps it"},
    {"gate.chi", VT::kRealList, "1", "", "dispersive coupling (drive mode, solve-schedule)"},
    {"gate.eps_max", VT::kReal, "10", "", "drive amplitude bound for the schedule solver"},
    {"gate.target_phase", VT::kRealList, "0.78539816339744828", "",
     "conditional phase targets for solve-schedule"},

    {"backend.kind", VT::kEnum, "exact", "exact|fock|both", "simulation backend(s)"},
    {"backend.cutoff", VT::kString, "auto", "",
     "Fock cutoff: auto (from the largest branch amplitude) or a fixed integer"},
    {"backend.max_cutoff", VT::kInt, "256", "", "largest cutoff the auto policy may choose"},
    {"backend.convergence", VT::kBool, "false", "",
     "also run every Fock point at twice the cutoff and report the fidelity change"},

    {"loss.eta", VT::kRealList, "0", "", "beam-splitter reflectivity per conditional displacement"},
    {"loss.compensate", VT::kBool, "true", "", "pre-scale displacements by 1/sqrt(1-eta^2)"},
    {"loss.alpha_sin_theta", VT::kRealList, "0.1, 0.3, 0.6", "", "loss-scan grid of alpha sin(theta)"},
    {"loss.theta", VT::kReal, "1.5707963267948966", "", "loss-scan rotation angle"},
    {"loss.schedule", VT::kEnum, "full-gate", "full-gate|single",
     "loss-scan schedule: the four-displacement gate or one conditional displacement"},
    {"loss.compensation_eta", VT::kReal, "0.2", "", "loss-scan compensation check reflectivity"},
    {"loss.two_mode_eta", VT::kReal, "0.1", "", "loss-scan two-mode Fock check reflectivity"},
    {"loss.two_mode_cutoff", VT::kInt, "32", "", "cutoff per mode of the two-mode Fock check"},

    {"input.state", VT::kEnum, "uniform", "uniform|basis|coeffs|random", "two-qubit input state"},
    {"input.basis", VT::kEnum, "00", "00|01|10|11", "basis label when input.state = basis"},
    {"input.coeffs", VT::kComplexList, "0.5, 0.5, 0.5, 0.5", "",
     "four coefficients (normalized on use) when input.state = coeffs"},
    {"input.count", VT::kInt, "1", "", "number of seeded random states when input.state = random"},
    {"input.bus_amp", VT::kComplex, "0", "", "initial coherent bus amplitude"},

    {"fock.target", VT::kEnum, "gate", "gate|drive", "fock-compare subject"},
    {"fock.eps", VT::kRealList, "0.25, 1", "", "fock-compare drive grid: amplitudes"},
    {"fock.chi", VT::kRealList, "-1, 0.05, 1", "", "fock-compare drive grid: couplings"},
    {"fock.t", VT::kRealList, "0.1, 1, 3.1415926535897931", "", "fock-compare drive grid: durations"},
    {"fock.report_t", VT::kRealList, "0.001, 0.01, 0.1", "",
     "durations (eps = chi = 1) of the small chi*t discrepancy report"},

    {"tolerance.fidelity", VT::kReal, "1e-12", "", "exact-backend infidelity bound"},
    {"tolerance.defect", VT::kReal, "1e-12", "", "bus disentanglement defect bound"},
    {"tolerance.phase", VT::kReal, "1e-10", "", "conditional phase error bound"},
    {"tolerance.fock_fidelity", VT::kReal, "1e-08", "", "Fock-backend infidelity bound"},
    {"tolerance.leakage", VT::kReal, "1e-09", "", "Fock leakage bound (enforced with run.strict)"},
    {"tolerance.convergence", VT::kReal, "1e-09", "", "fidelity change bound under cutoff doubling"},
    {"tolerance.slope", VT::kReal, "0.01", "", "relative tolerance of the fitted dephasing slope"},
    {"tolerance.ratio_spread", VT::kReal, "0.01", "",
     "relative spread bound of exponent / (eta^2 alpha^2 sin^2 theta)"},
    {"tolerance.two_mode", VT::kReal, "1e-06", "", "two-mode Fock loss check bound"},
    {"tolerance.closure", VT::kReal, "1e-10", "", "schedule loop closure bound"},

    {"output.dir", VT::kString, "qubus-out", "", "directory for results.csv and summary.json"},
    {"output.timing", VT::kBool, "false", "",
     "record wall-clock runtime_ms; off keeps outputs byte-reproducible"},
};

const KeySpec& spec_for(const std::string& key) {
  const auto it = std::find_if(kKeys.begin(), kKeys.end(), [&](const KeySpec& s) { return s.key == key; });
  if (it == kKeys.end()) throw ConfigError("unknown key '" + key + "'");
  return *it;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.emplace_back(trim(item));
  return out;
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    out = false;
    return true;
  }
  return false;
}

bool parse_int(const std::string& text, long& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

void check_value(const KeySpec& spec, const std::string& value) {
  const auto bad = [&](const std::string& why) {
    throw ConfigError("key '" + spec.key + "': " + why + " (got '" + value + "')");
  };
  try {
    switch (spec.type) {
      case VT::kString:
        break;
      case VT::kEnum: {
        std::istringstream in(spec.choices);
        std::string choice;
        while (std::getline(in, choice, '|')) {
          if (choice == value) return;
        }
        bad("expected one of " + spec.choices);
        break;
      }
      case VT::kInt: {
        long v = 0;
        if (!parse_int(value, v) || v < 0) bad("expected a non-negative integer");
        break;
      }
      case VT::kReal:
        if (!std::isfinite(parse_real(value))) bad("expected a finite real");
        break;
      case VT::kBool: {
        bool b = false;
        if (!parse_bool(value, b)) bad("expected true or false");
        break;
      }
      case VT::kComplex:
        parse_complex(value);
        break;
      case VT::kRealList: {
        const auto items = split_list(value);
        if (items.empty()) bad("expected at least one value");
        for (const auto& item : items) {
          if (!std::isfinite(parse_real(item))) bad("expected finite reals");
        }
        break;
      }
      case VT::kComplexList: {
        const auto items = split_list(value);
        if (items.empty()) bad("expected at least one value");
        for (const auto& item : items) parse_complex(item);
        break;
      }
    }
  } catch (const ParseError& e) {
    bad(e.what());
  }
}

}  // namespace

const std::vector<KeySpec>& schema() { return kKeys; }

Config::Config() {
  for (const auto& spec : kKeys) values_[spec.key] = spec.fallback;
}

void Config::set(const std::string& key, const std::string& value, const std::string& where) {
  try {
    const auto& spec = spec_for(key);
    const std::string clean(trim(value));
    check_value(spec, clean);
    if (key == "backend.cutoff" && clean != "auto") {
      long n = 0;
      if (!parse_int(clean, n) || n < 2) {
        throw ConfigError("key 'backend.cutoff': expected auto or an integer >= 2 (got '" + clean + "')");
      }
    }
    values_[key] = clean;
    explicit_[key] = true;
  } catch (const ConfigError& e) {
    throw ConfigError(where.empty() ? e.what() : where + ": " + e.what());
  }
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

long Config::integer(const std::string& key) const {
  long v = 0;
  parse_int(raw(key), v);
  return v;
}

double Config::real(const std::string& key) const { return parse_real(raw(key)); }

bool Config::flag(const std::string& key) const {
  bool b = false;
  parse_bool(raw(key), b);
  return b;
}

Complex Config::complex(const std::string& key) const { return parse_complex(raw(key)); }

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) out.push_back(parse_real(item));
  return out;
}

std::vector<Complex> Config::complexes(const std::string& key) const {
  std::vector<Complex> out;
  for (const auto& item : split_list(raw(key))) out.push_back(parse_complex(item));
  return out;
}

std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& source) {
  std::vector<ConfigEntry> out;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    const std::string where = source + ":" + std::to_string(line);
    std::string_view body = line_text;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) throw ConfigError(where + ": malformed section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      if (section.find_first_of(" \t=.") != std::string::npos) {
        throw ConfigError(where + ": malformed section name '" + section + "'");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string name(trim(body.substr(0, eq)));
    if (name.empty() || name.find_first_of(" \t") != std::string::npos) {
      throw ConfigError(where + ": malformed key '" + name + "'");
    }
    const std::string key = section.empty() ? name : section + "." + name;
    if (const auto [it, fresh] = seen.emplace(key, line); !fresh) {
      throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " +
                        std::to_string(it->second) + ")");
    }
    out.push_back({key, std::string(trim(body.substr(eq + 1))), line});
  }
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"paper-weak", "paper-strong", "paper-loss"};
  return names;
}

std::vector<std::pair<std::string, std::string>> preset_entries(const std::string& name) {
  // d = sqrt(pi/8) on both qubits; alpha = d / (2 sin theta) is derived from beta and theta.
  const std::string d = "0.62665706865775006";
  if (name == "paper-strong") {
    return {{"experiment", "gate-check"}, {"gate.mode", "rotations"}, {"gate.beta1", d},
            {"gate.beta2", d},            {"gate.theta", "1.5707963267948966"},
            {"backend.kind", "both"},     {"input.state", "random"},
            {"input.count", "100"},       {"backend.convergence", "true"}};
  }
  if (name == "paper-weak") {
    // Branch excursions reach |alpha| ~ 63, far beyond a desk-scale Fock cutoff.
    return {{"experiment", "gate-check"}, {"gate.mode", "rotations"}, {"gate.beta1", d},
            {"gate.beta2", d},            {"gate.theta", "0.01"},
            {"backend.kind", "exact"},    {"input.state", "random"},
            {"input.count", "100"}};
  }
  if (name == "paper-loss") {
    return {{"experiment", "loss-scan"},
            {"gate.beta1", d},
            {"gate.beta2", d},
            {"gate.theta", "1.5707963267948966"},
            {"backend.kind", "both"},
            {"loss.eta", "0.001, 0.003, 0.01"},
            {"loss.alpha_sin_theta", "0.1, 0.3, 0.6"},
            {"loss.compensate", "true"},
            {"input.state", "uniform"}};
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

Config resolve_config(const std::vector<ConfigEntry>& file_entries,
                      const std::vector<std::string>& overrides, const std::string& source) {
  Config config;
  std::string preset;
  for (const auto& e : file_entries) {
    if (e.key == "preset") preset = std::string(trim(e.value));
  }
  std::vector<std::pair<std::string, std::string>> parsed_overrides;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set '" + o + "': expected key=value");
    parsed_overrides.emplace_back(std::string(trim(std::string_view(o).substr(0, eq))),
                                  o.substr(eq + 1));
    if (parsed_overrides.back().first == "preset") preset = std::string(trim(o.substr(eq + 1)));
  }
  if (!preset.empty()) {
    for (const auto& [key, value] : preset_entries(preset)) config.set(key, value, "preset " + preset);
  }
  for (const auto& e : file_entries) config.set(e.key, e.value, source + ":" + std::to_string(e.line));
  for (const auto& [key, value] : parsed_overrides) config.set(key, value, "--set " + key);
  return config;
}

}  // namespace qubus::cli
