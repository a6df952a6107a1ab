#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "catchup/uncertainty.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

using namespace catchup;

int main(int argc, char** argv) {
  CLI::App app{"Nash guaranteed-cost policy synthesis and catch-up scenario simulation"};
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> horizon;
  std::optional<std::string> realization;
  bool print_default = false;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for random realizations and synthetic data");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--horizon", horizon, "Scenario horizon in years");
  app.add_option("--realization", realization, "Uncertainty realization")
      ->check(CLI::IsMember({"zero", "sin", "random", "linear"}));
  app.add_flag("--print-default-config", print_default, "Print the default configuration and exit");

  auto* synth = app.add_subcommand("synthesize", "Compute guaranteed-cost gains and write solution.json");
  bool check_only = false;
  synth->add_flag("--check-only", check_only, "Only check the standing assumptions");

  auto* check = app.add_subcommand("check", "Check the standing assumptions of the game");

  auto* scen = app.add_subcommand("scenarios", "Simulate the nine catch-up scenarios");
  std::optional<std::string> solution;
  scen->add_option("--solution", solution, "Solution file from synthesize")->check(CLI::ExistingFile);
  bool no_svg = false;
  scen->add_flag("--no-svg", no_svg, "Skip the SVG charts");

  auto* est = app.add_subcommand("estimate", "Fit the dynamic equations to an annual CSV series");
  std::string csv;
  std::optional<std::string> exclude;
  std::optional<std::string> synthetic_out;
  std::size_t rows = 40;
  double noise = 0.0;
  int first_year = 1990;
  est->add_option("csv", csv, "Input CSV (year column first)");
  est->add_option("--exclude", exclude, "Year ranges to drop, e.g. 2008-2009,2020-2021");
  est->add_option("--write-synthetic", synthetic_out, "Write a synthetic series to this path instead of fitting");
  est->add_option("--rows", rows, "Rows of synthetic data")->check(CLI::Range(4, 100000));
  est->add_option("--noise", noise, "Noise standard deviation of synthetic data")->check(CLI::NonNegativeNumber);
  est->add_option("--first-year", first_year, "First year of synthetic data");

  app.require_subcommand(0, 1);
  CLI11_PARSE(app, argc, argv);

  if (print_default) {
    std::cout << cli::config_to_json(cli::RunConfig{}) << "\n";
    return cli::kOk;
  }

  cli::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    if (horizon) cfg.horizon = *horizon;
    if (realization) cfg.realization = uncertainty::parse_realization(*realization);
    if (exclude) cfg.estimate.exclude = *exclude;
    if (no_svg) cfg.svg = false;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kConfigError;
  }

  if (*synth) {
    if (check_only) return cli::run_check(cfg, std::cout, std::cerr);
    return cli::run_synthesize(cfg, std::cout, std::cerr);
  }
  if (*check) return cli::run_check(cfg, std::cout, std::cerr);
  if (*scen) return cli::run_scenarios(cfg, solution, std::cout, std::cerr);
  if (*est) {
    if (synthetic_out) return cli::run_write_synthetic(cfg, *synthetic_out, first_year, rows, noise, std::cout, std::cerr);
    if (csv.empty()) {
      std::cerr << "error: estimate needs a CSV path\n";
      return cli::kConfigError;
    }
    return cli::run_estimate(cfg, csv, std::cout, std::cerr);
  }
  std::cout << app.help();
  return cli::kOk;
}
