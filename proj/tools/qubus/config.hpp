#pragma once
// Scenario configuration: flat dotted keys read from a small INI-like file.
//
//   # comment
//   experiment = gate-check
//   [gate]
//   theta = 1.5707963267948966, 0.01     -> key "gate.theta"
//
// Every key has a declared type and default (see kSchema); unknown keys,
// malformed values and duplicate keys are rejected with line context.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qubus/phase_space.hpp"

namespace qubus::cli {

enum class ValueType { kString, kEnum, kInt, kReal, kBool, kComplex, kRealList, kComplexList };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string fallback;  // default, in config syntax
  std::string choices;   // '|' separated, enums only
  std::string help;
};

const std::vector<KeySpec>& schema();

/// Raised for anything that must end the run with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  /// Every key at its default.
  Config();

  /// Overlay `key = value` after validation; `where` prefixes error messages.
  void set(const std::string& key, const std::string& value, const std::string& where = "");
  bool is_set(const std::string& key) const { return explicit_.count(key) != 0; }

  const std::string& raw(const std::string& key) const;
  std::string text(const std::string& key) const { return raw(key); }
  long integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  Complex complex(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<Complex> complexes(const std::string& key) const;

  /// All keys with their current values, sorted.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

/// Parsed file contents as (key, value, line) triples, in file order.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};
std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& source);

/// Names accepted by `preset`.
const std::vector<std::string>& preset_names();
/// Key/value overlay of a named preset; throws ConfigError for unknown names.
std::vector<std::pair<std::string, std::string>> preset_entries(const std::string& name);

/// Resolution order: defaults, preset (from file or `preset_override`),
/// file entries, then `--set` overrides in order.
Config resolve_config(const std::vector<ConfigEntry>& file_entries,
                      const std::vector<std::string>& overrides, const std::string& source);

}  // namespace qubus::cli
