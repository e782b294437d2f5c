#include "output.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "qubus/errors.hpp"
#include "qubus/text.hpp"

namespace qubus::cli {

namespace {

std::string csv_cell(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char ch : value) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string render_csv(const Outcome& outcome) {
  std::set<std::string> declared;
  std::string text;
  for (std::size_t i = 0; i < outcome.columns.size(); ++i) {
    declared.insert(outcome.columns[i].name);
    text += (i ? "," : "") + csv_cell(outcome.columns[i].name);
  }
  text += '\n';
  for (const auto& row : outcome.rows) {
    for (const auto& [key, value] : row) {
      if (!declared.count(key)) throw std::logic_error("row cell '" + key + "' has no declared column");
    }
    for (std::size_t i = 0; i < outcome.columns.size(); ++i) {
      const auto it = row.find(outcome.columns[i].name);
      text += (i ? "," : "") + (it == row.end() ? std::string() : csv_cell(it->second));
    }
    text += '\n';
  }
  return text;
}

nlohmann::json build_summary(const Config& config, const Outcome& outcome) {
  using nlohmann::json;
  json summary;
  summary["experiment"] = config.text("experiment");
  // The output location is left out so runs into different directories compare equal.
  auto echo = config.values();
  echo.erase("output.dir");
  summary["config"] = echo;

  json columns = json::array();
  for (const auto& c : outcome.columns) columns.push_back({{"name", c.name}, {"description", c.description}});
  summary["schema"] = {
      {"columns", columns},
      {"format", "results.csv: header row, one row per grid point in grid order; reals in shortest "
                 "round-trip decimal, complex values as re+imi; empty cells are not applicable"}};

  // min/max of every column whose populated cells are all numeric.
  json aggregates = json::object();
  for (const auto& c : outcome.columns) {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    bool numeric = true;
    for (const auto& row : outcome.rows) {
      const auto it = row.find(c.name);
      if (it == row.end() || it->second.empty()) continue;
      double v = 0.0;
      try {
        v = parse_real(it->second);
      } catch (const ParseError&) {
        numeric = false;
        break;
      }
      lo = count ? std::min(lo, v) : v;
      hi = count ? std::max(hi, v) : v;
      ++count;
    }
    if (numeric && count) aggregates[c.name] = {{"min", lo}, {"max", hi}, {"count", count}};
  }
  summary["aggregates"] = aggregates;
  summary["rows"] = outcome.rows.size();

  json checks = json::array();
  for (const auto& c : outcome.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
  }
  summary["checks"] = checks;
  summary["passed"] = outcome.passed();
  summary["exit_code"] = outcome.passed() ? 0 : 3;
  summary["details"] = outcome.extra;
  return summary;
}

void write_artifacts(const std::filesystem::path& dir, const Config& config, const Outcome& outcome) {
  const auto csv = render_csv(outcome);
  const auto summary = build_summary(config, outcome).dump(2) + "\n";
  std::filesystem::create_directories(dir);
  write_file(dir / "results.csv", csv);
  write_file(dir / "summary.json", summary);
}

}  // namespace qubus::cli
