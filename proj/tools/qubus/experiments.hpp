#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace qubus::cli {

struct Column {
  std::string name;
  std::string description;
};

/// Cells keyed by column name; columns a row leaves out are written empty.
using Row = std::map<std::string, std::string>;

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

struct Outcome {
  std::vector<Column> columns;
  std::vector<Row> rows;
  nlohmann::json extra = nlohmann::json::object();  // experiment-specific summary entries
  std::vector<Check> checks;

  bool passed() const;
};

/// A validated experiment ready to execute. Building it performs every
/// check that maps to exit code 2, so nothing is written for a bad config.
class Experiment {
 public:
  virtual ~Experiment() = default;
  virtual Outcome run(unsigned threads) const = 0;
};

std::unique_ptr<Experiment> plan_experiment(const Config& config);

}  // namespace qubus::cli
