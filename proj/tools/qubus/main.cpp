// qubus <experiment> --config FILE [--set key=value ...] [--out DIR] [--seed N] [--strict]
//
// Exit codes: 0 all checks pass, 2 invalid invocation or configuration
// (nothing written), 3 a declared tolerance failed or the run aborted.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"
#include "qubus/errors.hpp"
#include "qubus/text.hpp"

namespace {

constexpr int kInvalid = 2;
constexpr int kToleranceFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace qubus::cli;

  CLI::App app{"Qubus hybrid gate simulator: batch experiments with CSV/JSON output"};
  std::string experiment;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  long seed = -1;
  bool strict = false;
  std::string preset;
  long threads = -1;
  app.add_option("experiment", experiment, "gate-check | sweep | loss-scan | fock-compare | solve-schedule")
      ->required()
      ->check(CLI::IsMember({"gate-check", "sweep", "loss-scan", "fock-compare", "solve-schedule"}));
  app.add_option("--config", config_path, "scenario configuration file")->required();
  app.add_option("--set", sets, "override one key, e.g. --set gate.theta=0.01");
  app.add_option("--out", out_dir, "output directory (output.dir)");
  app.add_option("--seed", seed, "random seed (seed)")->check(CLI::NonNegativeNumber);
  app.add_flag("--strict", strict, "enforce tolerance.leakage on Fock runs (run.strict)");
  app.add_option("--preset", preset, "named base configuration (preset)");
  app.add_option("--threads", threads, "worker threads, 0 = hardware (run.threads)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  Config config;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    std::vector<std::string> overrides;
    if (!preset.empty()) overrides.push_back("preset=" + preset);
    overrides.insert(overrides.end(), sets.begin(), sets.end());
    overrides.push_back("experiment=" + experiment);
    if (!out_dir.empty()) overrides.push_back("output.dir=" + out_dir);
    if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
    if (strict) overrides.push_back("run.strict=true");
    if (threads >= 0) overrides.push_back("run.threads=" + std::to_string(threads));
    config = resolve_config(parse_config_text(text.str(), config_path), overrides, config_path);
  } catch (const ConfigError& e) {
    std::cerr << "qubus: " << e.what() << '\n';
    return kInvalid;
  }

  Outcome outcome;
  try {
    const auto plan = plan_experiment(config);
    outcome = plan->run(static_cast<unsigned>(config.integer("run.threads")));
  } catch (const ConfigError& e) {
    std::cerr << "qubus: " << e.what() << '\n';
    return kInvalid;
  } catch (const qubus::Error& e) {
    std::cerr << "qubus: run aborted: " << e.what() << '\n';
    return kToleranceFailure;
  }

  try {
    write_artifacts(config.text("output.dir"), config, outcome);
  } catch (const std::exception& e) {
    std::cerr << "qubus: " << e.what() << '\n';
    return kToleranceFailure;
  }

  std::cout << config.text("experiment") << ": " << outcome.rows.size() << " rows -> "
            << config.text("output.dir") << '\n';
  for (const auto& c : outcome.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << qubus::format_real(c.value) << " (limit " << qubus::format_real(c.limit)
              << ")\n";
  }
  return outcome.passed() ? 0 : kToleranceFailure;
}
