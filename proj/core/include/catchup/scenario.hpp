#pragma once

// Catch-up scenarios: a planned nominal GDP path combined with a planned
// budget-balance path, simulated under the synthesized feedback and scored by
// the debt proxy d_t = D_t / ξ_t with D_{t+1} = D_t − ḡ_t.
//
// Balances are signed: a deficit is negative and raises D.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catchup/fimo.hpp"
#include "catchup/synthesis.hpp"
#include "catchup/uncertainty.hpp"

namespace catchup::scenario {

enum class GrowthVariant { kModerate = 1, kAverage = 2, kStrong = 3 };
enum class DeficitVariant { kTight, kLoose, kPopulist };

/// 2.575%, 3.605% and 5.15% a year.
double growth_rate(GrowthVariant v);
/// "1", "2", "3" and "A", "B", "C".
char growth_code(GrowthVariant v);
char deficit_code(DeficitVariant v);
std::string to_string(GrowthVariant v);
std::string to_string(DeficitVariant v);

/// Planned balance ratio g*_t/ξ*_t for calendar years start_year .. start_year+horizon.
///   tight:    −3%, then +0.5 pp a year until balanced, then 0
///   loose:    −6.7%, −4.8%, −3.5%, then −3%
///   populist: loose, but −4.5% in every fourth year from election_anchor
std::vector<double> balance_ratios(DeficitVariant v, int start_year, int horizon, int election_anchor = 2026);

struct ScenarioSpec {
  GrowthVariant growth = GrowthVariant::kModerate;
  DeficitVariant deficit = DeficitVariant::kTight;
  int start_year = 2023;
  int horizon = 20;
  int election_anchor = 2026;
  double xi0_star = 100.0;
  double d0_debt = 73.5;
  fimo::MacroState x0 = fimo::reference_x0();
  uncertainty::RealizationKind realization = uncertainty::RealizationKind::kSin;
  std::uint64_t seed = 0;

  std::string label() const;
  /// Throws std::invalid_argument.
  void validate() const;
};

struct ReferencePaths {
  std::vector<double> xi_star;
  std::vector<double> g_star;
  std::vector<double> ratio;
};

/// Values for t = 0 .. horizon.
ReferencePaths build_reference_paths(const ScenarioSpec& spec);

struct YearRecord {
  int year = 0;
  double z = 0.0;
  double pi_tilde = 0.0;
  double g = 0.0;
  double i_tilde = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double xi_star = 0.0;
  double xi = 0.0;
  double g_star = 0.0;
  double g_bar = 0.0;
  double debt = 0.0;
  double debt_ratio = 0.0;
  /// Accumulated stage costs up to and including this year.
  double cost_fiscal = 0.0;
  double cost_monetary = 0.0;
};

struct ScenarioResult {
  std::string label;
  ScenarioSpec spec;
  std::vector<YearRecord> records;  // t = 0 .. horizon

  std::vector<double> debt_ratios() const;
};

ScenarioResult simulate_closed_loop(const ScenarioSpec& spec, const synthesis::GuaranteedSolution& sol,
                                    const fimo::MacroParams& params);

/// 1A … 3C in that order, all sharing base's x0, realization and seed.
std::vector<ScenarioResult> run_all_nine(const ScenarioSpec& base, const synthesis::GuaranteedSolution& sol,
                                         const fimo::MacroParams& params);

enum class Trend { kDecreasing, kStabilizing, kIncreasing };
std::string to_string(Trend t);

/// Sign of the mean of the last `window` differences, with a dead band.
Trend classify_trend(const std::vector<double>& series, double dead_band = 1e-3, std::size_t window = 5);

struct ScenarioSummary {
  std::string label;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double final_ratio = 0.0;
  /// First year the ratio crosses 0.5, with the direction ("down" or "up").
  std::optional<int> cross_year;
  std::string cross_direction;
  Trend trend = Trend::kStabilizing;
  /// First year from which |π̃| ≤ 1% holds through the horizon.
  std::optional<int> inflation_band_year;
};

/// Throws std::invalid_argument for fewer than two results.
std::vector<ScenarioSummary> compare_scenarios(const std::vector<ScenarioResult>& results);

/// Header comment line followed by one row per year.
std::string to_csv(const ScenarioResult& r, const std::string& header_comment);
std::string comparison_csv(const std::vector<ScenarioSummary>& rows, const std::string& header_comment);

/// d_t line chart for a set of results (one polyline each).
std::string debt_ratio_svg(const std::vector<const ScenarioResult*>& results, const std::string& title);

/// %.17g, the format used for every number written by this library.
std::string format_number(double v);

}  // namespace catchup::scenario
