#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "experiments.hpp"

namespace qubus::cli {

/// Header row plus one line per row, columns in declaration order.
std::string render_csv(const Outcome& outcome);

/// Config echo, column schema, per-column aggregates, checks and verdict.
nlohmann::json build_summary(const Config& config, const Outcome& outcome);

/// Writes results.csv and summary.json into `dir`, creating it if needed.
void write_artifacts(const std::filesystem::path& dir, const Config& config, const Outcome& outcome);

}  // namespace qubus::cli
