#pragma once

// Subcommand bodies, kept out of main() so tests can drive them directly.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>

#include "catchup/game.hpp"
#include "cli/config.hpp"

namespace catchup::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kAssumptionFailed = 2,
  kSynthesisFailed = 3,
  kStaleSolution = 4,
  kEstimateFailed = 5,
};

/// The fiscal–monetary model, or the game document named by the config.
game::GameModel load_model(const RunConfig& c);

/// Assumptions 1–2 with diagnostics.
int run_check(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Writes <output_dir>/solution.json.
int run_synthesize(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Writes 1A.csv … 3C.csv, compare.csv and, if enabled, one SVG per deficit
/// family. Without a solution file the solution is synthesized first.
int run_scenarios(const RunConfig& c, const std::optional<std::string>& solution_path, std::ostream& out,
                  std::ostream& err);

/// Fits both equations and writes <output_dir>/fit.json.
int run_estimate(const RunConfig& c, const std::string& csv_path, std::ostream& out, std::ostream& err);

/// Writes a synthetic series generated from the configured coefficients.
int run_write_synthetic(const RunConfig& c, const std::string& path, int first_year, std::size_t rows,
                        double noise_sd, std::ostream& out, std::ostream& err);

}  // namespace catchup::cli
