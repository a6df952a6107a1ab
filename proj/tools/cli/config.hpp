#pragma once

// Run configuration shared by every subcommand.
//
// The on-disk form is a JSON object. Every key is optional; missing keys take
// the defaults below, unknown keys are rejected. The config hash is taken over
// the fully resolved document, so two files that differ only in omitted
// defaults hash the same.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "catchup/fimo.hpp"
#include "catchup/scenario.hpp"
#include "catchup/synthesis.hpp"
#include "catchup/uncertainty.hpp"

namespace catchup::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EstimateSettings {
  std::string exclude = "2008-2009,2020-2021";
  std::string z_column = "z";
  std::string i_column = "i";
  std::string pi_column = "pi";
  std::string g_column = "g";
  bool intercept = false;
};

struct RunConfig {
  fimo::MacroParams macro;
  fimo::MacroState x0 = fimo::reference_x0();

  double d0_debt = 73.5;
  double xi0_star = 100.0;
  int horizon = 20;
  int start_year = 2023;
  int election_anchor = 2026;

  uncertainty::RealizationKind realization = uncertainty::RealizationKind::kSin;
  std::uint64_t seed = 0;

  double strictness = 1e-8;
  double tolerance = 1e-7;
  int max_iterations = 200;
  bool refine_multipliers = true;

  EstimateSettings estimate;

  std::string output_dir = "out";
  bool svg = true;
  /// Optional path to a game document; replaces the fiscal–monetary model in
  /// synthesize and check.
  std::optional<std::string> game_file;

  /// Throws ConfigError.
  void validate() const;

  synthesis::SynthesisOptions synthesis_options() const;
  /// Scenario template; growth and deficit are filled in per scenario.
  scenario::ScenarioSpec scenario_base() const;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& c, int indent = 2);

/// FNV-1a over the compact resolved JSON with the output section at its
/// defaults, 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace catchup::cli
