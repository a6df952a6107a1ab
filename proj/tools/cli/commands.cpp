#include "cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catchup/estimate.hpp"
#include "catchup/fimo.hpp"
#include "catchup/scenario.hpp"
#include "catchup/serialization.hpp"
#include "catchup/synthesis.hpp"
#include "json.hpp"

namespace catchup::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string row_string(const linalg::Matrix& m) {
  std::string s = "[";
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) s += ", ";
    s += fmt("%.6g", m(0, c));
  }
  return s + "]";
}

std::string provenance(const RunConfig& c) {
  return "config_hash=" + config_hash(c) + " seed=" + std::to_string(c.seed);
}

linalg::Vector x0_vector(const RunConfig& c) { return {c.x0.z, c.x0.pi_tilde}; }

// Synthesizes and reports; returns the exit code, filling `sol` on success.
int synthesize_into(const RunConfig& c, const game::GameModel& m, synthesis::GuaranteedSolution& sol,
                    std::ostream& out, std::ostream& err) {
  const auto x0 = x0_vector(c);
  if (x0.size() != m.state_dim()) {
    err << "error: x0 has " << x0.size() << " entries but the game has state dimension " << m.state_dim() << "\n";
    return kConfigError;
  }
  const auto t0 = std::chrono::steady_clock::now();
  try {
    sol = synthesis::synthesize(m, x0, c.synthesis_options());
  } catch (const synthesis::AssumptionError& e) {
    err << "assumption failure: " << e.what() << "\n";
    return kAssumptionFailed;
  } catch (const synthesis::SynthesisError& e) {
    err << "synthesis failed: " << e.what() << "\n";
    const auto& h = e.history();
    const std::size_t from = h.size() > 5 ? h.size() - 5 : 0;
    for (std::size_t k = from; k < h.size(); ++k) {
      err << "  iteration " << h[k].iteration << ": dK=" << fmt("%.3e", h[k].gain_change)
          << " dP=" << fmt("%.3e", h[k].ptilde_change) << (h[k].damped ? " (damped)" : "") << "\n";
    }
    return kSynthesisFailed;
  } catch (const linalg::NumericalError& e) {
    err << "synthesis failed: " << e.what() << "\n";
    return kSynthesisFailed;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "guaranteed cost V1(x0) = " << fmt("%.6g", sol.cost(1, x0)) << "\n";
  out << "guaranteed cost V2(x0) = " << fmt("%.6g", sol.cost(2, x0)) << "\n";
  out << "K1 = " << row_string(sol.gains[0]) << "\n";
  out << "K2 = " << row_string(sol.gains[1]) << "\n";
  out << "closed-loop spectral radius = " << fmt("%.6g", sol.closed_loop_radius) << "\n";
  out << "certificate margins = " << fmt("%.3e", sol.margins[0]) << ", " << fmt("%.3e", sol.margins[1]) << "\n";
  out << "gain residual = " << fmt("%.3e", sol.gain_residual) << "\n";
  out << "iterations = " << sol.iterations << " (" << fmt("%.2f", secs) << " s)\n";
  return kOk;
}

}  // namespace

game::GameModel load_model(const RunConfig& c) {
  if (c.game_file) return serialization::model_from_json(read_file(*c.game_file));
  return fimo::build_canonical(c.macro);
}

int run_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
  game::GameModel m;
  try {
    m = load_model(c);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto xi0 = game::xi0(m);
  out << "Xi0 diagonal:";
  for (std::size_t k = 0; k < xi0.dim(); ++k) out << " " << fmt("%.6g", xi0(k, k));
  out << "\n";
  out << "open-loop spectral radius = " << fmt("%.6g", linalg::spectral_radius(m.a)) << "\n";
  const auto a1 = game::check_assumption1(m);
  out << "assumption 1: " << (a1.passed ? "pass" : "FAIL") << (a1.message.empty() ? "" : " (" + a1.message + ")")
      << "\n";
  const auto a2 = game::check_assumption2(m);
  out << "assumption 2: " << (a2.passed() ? "pass" : "FAIL") << (a2.message.empty() ? "" : " (" + a2.message + ")")
      << "\n";
  if (!a1.passed || !a2.passed()) {
    err << "assumption check failed:";
    if (!a1.passed) err << " assumption 1 (" << a1.failed_condition << ")";
    if (!a2.stabilizable) err << " assumption 2 (stabilizability)";
    if (!a2.detectable) err << " assumption 2 (detectability)";
    err << "\n";
    return kAssumptionFailed;
  }
  return kOk;
}

int run_synthesize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  game::GameModel m;
  try {
    m = load_model(c);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  synthesis::GuaranteedSolution sol;
  if (int rc = synthesize_into(c, m, sol, out, err); rc != kOk) return rc;

  json doc = json::parse(serialization::solution_to_json(sol, m, x0_vector(c)));
  doc["config_hash"] = config_hash(c);
  doc["seed"] = c.seed;
  const fs::path path = fs::path(c.output_dir) / "solution.json";
  try {
    write_file(path, doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  out << "wrote " << path.string() << "\n";
  return kOk;
}

int run_scenarios(const RunConfig& c, const std::optional<std::string>& solution_path, std::ostream& out,
                  std::ostream& err) {
  if (c.game_file) {
    err << "error: scenarios need the fiscal-monetary model; remove 'game' from the config\n";
    return kConfigError;
  }
  const auto m = fimo::build_canonical(c.macro);
  const std::string hash = serialization::model_hash(m);
  synthesis::GuaranteedSolution sol;
  if (solution_path) {
    try {
      auto loaded = serialization::solution_from_json(read_file(*solution_path));
      if (loaded.model_hash != hash) {
        err << "error: solution '" << *solution_path << "' was computed for model " << loaded.model_hash
            << " but the config describes model " << hash
            << "; the macro parameters changed since it was written. Re-run synthesize.\n";
        return kStaleSolution;
      }
      sol = std::move(loaded.solution);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kConfigError;
    }
  } else {
    out << "no solution file given; synthesizing\n";
    if (int rc = synthesize_into(c, m, sol, out, err); rc != kOk) return rc;
  }

  const auto results = scenario::run_all_nine(c.scenario_base(), sol, c.macro);
  const fs::path dir(c.output_dir);
  const std::string stamp = provenance(c) + " model_hash=" + hash +
                            " realization=" + uncertainty::to_string(c.realization);
  try {
    for (const auto& r : results) {
      write_file(dir / (r.label + ".csv"), scenario::to_csv(r, "scenario=" + r.label + " " + stamp));
    }
    const auto summary = scenario::compare_scenarios(results);
    write_file(dir / "compare.csv", scenario::comparison_csv(summary, stamp));
    if (c.svg) {
      for (auto d : {scenario::DeficitVariant::kTight, scenario::DeficitVariant::kLoose,
                     scenario::DeficitVariant::kPopulist}) {
        std::vector<const scenario::ScenarioResult*> group;
        for (const auto& r : results)
          if (r.spec.deficit == d) group.push_back(&r);
        const std::string name = scenario::to_string(d);
        write_file(dir / (name + ".svg"), scenario::debt_ratio_svg(group, "Debt ratio, " + name + " budget path"));
      }
    }
    out << "scenario  d_min     d_max     d_final   trend        cross 0.5   inflation band\n";
    for (const auto& s : summary) {
      char line[160];
      std::snprintf(line, sizeof line, "%-9s %-9.4f %-9.4f %-9.4f %-12s %-11s %s\n", s.label.c_str(), s.min_ratio,
                    s.max_ratio, s.final_ratio, scenario::to_string(s.trend).c_str(),
                    s.cross_year ? (std::to_string(*s.cross_year) + " " + s.cross_direction).c_str() : "-",
                    s.inflation_band_year ? std::to_string(*s.inflation_band_year).c_str() : "-");
      out << line;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  out << "wrote 9 scenario files and compare.csv to " << dir.string() << "\n";
  return kOk;
}

int run_estimate(const RunConfig& c, const std::string& csv_path, std::ostream& out, std::ostream& err) {
  estimate::TimeSeriesTable table;
  std::vector<estimate::YearRange> ranges;
  try {
    table = estimate::load_table(csv_path);
    ranges = estimate::parse_ranges(c.estimate.exclude);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kEstimateFailed;
  }
  estimate::ColumnMap cols;
  cols.z = c.estimate.z_column;
  cols.i = c.estimate.i_column;
  cols.pi = c.estimate.pi_column;
  cols.g = c.estimate.g_column;
  cols.i_star = c.macro.i_star;
  cols.intercept = c.estimate.intercept;

  estimate::OlsFit real;
  estimate::OlsFit monetary;
  try {
    real = estimate::fit_real_sphere(table, ranges, cols);
    monetary = estimate::fit_monetary(table, ranges, cols);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kEstimateFailed;
  }

  out << "input: " << csv_path << " (" << table.rows() << " rows)\n";
  out << "excluded years: " << (ranges.empty() ? "none" : estimate::format_ranges(ranges)) << "\n";
  json fits = json::object();
  for (const auto* f : {&real, &monetary}) {
    const std::string name = f == &real ? "real_sphere" : "monetary";
    out << "\n" << name << ": " << f->rows_used << " observations used, " << f->rows_excluded << " excluded, R^2 = "
        << fmt("%.4f", f->r_squared) << "\n";
    json coef = json::object();
    for (std::size_t k = 0; k < f->names.size(); ++k) {
      out << "  " << f->names[k] << " = " << fmt("%.6g", f->coefficients[k]) << "  (se "
          << fmt("%.3g", f->std_errors[k]) << ")\n";
      coef[f->names[k]] = {{"estimate", f->coefficients[k]}, {"std_error", f->std_errors[k]}};
    }
    fits[name] = {{"coefficients", coef},
                  {"r_squared", f->r_squared},
                  {"sigma2", f->sigma2},
                  {"rows_used", f->rows_used},
                  {"rows_excluded", f->rows_excluded},
                  {"years", f->years}};
  }
  json doc = {{"config_hash", config_hash(c)},
              {"seed", c.seed},
              {"input", csv_path},
              {"excluded_years", estimate::format_ranges(ranges)},
              {"fits", fits}};
  const fs::path path = fs::path(c.output_dir) / "fit.json";
  try {
    write_file(path, doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  out << "\nwrote " << path.string() << "\n";
  return kOk;
}

int run_write_synthetic(const RunConfig& c, const std::string& path, int first_year, std::size_t rows,
                        double noise_sd, std::ostream& out, std::ostream& err) {
  try {
    const auto t = estimate::synthetic_table(c.macro, first_year, rows, noise_sd, c.seed);
    write_file(path, "# synthetic series noise_sd=" + scenario::format_number(noise_sd) + " " + provenance(c) + "\n" +
                         estimate::to_csv(t));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  out << "wrote " << rows << " rows to " << path << "\n";
  return kOk;
}

}  // namespace catchup::cli
