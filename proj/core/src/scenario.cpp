#include "catchup/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace catchup::scenario {

double growth_rate(GrowthVariant v) {
  switch (v) {
    case GrowthVariant::kModerate:
      return 0.02575;
    case GrowthVariant::kAverage:
      return 0.03605;
    case GrowthVariant::kStrong:
      return 0.0515;
  }
  throw std::invalid_argument("unknown growth variant");
}

char growth_code(GrowthVariant v) { return static_cast<char>('0' + static_cast<int>(v)); }

char deficit_code(DeficitVariant v) {
  switch (v) {
    case DeficitVariant::kTight:
      return 'A';
    case DeficitVariant::kLoose:
      return 'B';
    case DeficitVariant::kPopulist:
      return 'C';
  }
  throw std::invalid_argument("unknown deficit variant");
}

std::string to_string(GrowthVariant v) {
  switch (v) {
    case GrowthVariant::kModerate:
      return "moderate";
    case GrowthVariant::kAverage:
      return "average";
    case GrowthVariant::kStrong:
      return "strong";
  }
  return "unknown";
}

std::string to_string(DeficitVariant v) {
  switch (v) {
    case DeficitVariant::kTight:
      return "tight";
    case DeficitVariant::kLoose:
      return "loose";
    case DeficitVariant::kPopulist:
      return "populist";
  }
  return "unknown";
}

std::vector<double> balance_ratios(DeficitVariant v, int start_year, int horizon, int election_anchor) {
  if (horizon < 0) throw std::invalid_argument("balance_ratios: negative horizon");
  std::vector<double> r(static_cast<std::size_t>(horizon) + 1);
  static constexpr double kLoose[] = {-0.067, -0.048, -0.035};
  for (int t = 0; t <= horizon; ++t) {
    double v_t = 0.0;
    if (v == DeficitVariant::kTight) {
      // In tenths of a percent so the balanced year lands on an exact zero.
      v_t = std::min(-30 + 5 * t, 0) / 1000.0;
    } else {
      v_t = t < 3 ? kLoose[t] : -0.03;
      const int year = start_year + t;
      if (v == DeficitVariant::kPopulist && year >= election_anchor && (year - election_anchor) % 4 == 0) v_t = -0.045;
    }
    r[static_cast<std::size_t>(t)] = v_t;
  }
  return r;
}

std::string ScenarioSpec::label() const { return std::string{growth_code(growth), deficit_code(deficit)}; }

void ScenarioSpec::validate() const {
  if (horizon < 1) throw std::invalid_argument("ScenarioSpec: horizon must be at least 1");
  if (!(xi0_star > 0.0) || !std::isfinite(xi0_star)) throw std::invalid_argument("ScenarioSpec: xi0_star must be positive");
  if (!(d0_debt > 0.0) || !std::isfinite(d0_debt)) throw std::invalid_argument("ScenarioSpec: d0_debt must be positive");
  if (!std::isfinite(x0.z) || !std::isfinite(x0.pi_tilde)) throw std::invalid_argument("ScenarioSpec: x0 must be finite");
}

ReferencePaths build_reference_paths(const ScenarioSpec& spec) {
  spec.validate();
  ReferencePaths p;
  p.ratio = balance_ratios(spec.deficit, spec.start_year, spec.horizon, spec.election_anchor);
  const double rate = growth_rate(spec.growth);
  double xi = spec.xi0_star;
  for (int t = 0; t <= spec.horizon; ++t) {
    p.xi_star.push_back(xi);
    p.g_star.push_back(p.ratio[static_cast<std::size_t>(t)] * xi);
    xi *= 1.0 + rate;
  }
  return p;
}

std::vector<double> ScenarioResult::debt_ratios() const {
  std::vector<double> d;
  d.reserve(records.size());
  for (const auto& r : records) d.push_back(r.debt_ratio);
  return d;
}

ScenarioResult simulate_closed_loop(const ScenarioSpec& spec, const synthesis::GuaranteedSolution& sol,
                                    const fimo::MacroParams& params) {
  spec.validate();
  const auto& k1 = sol.gains[0];
  const auto& k2 = sol.gains[1];
  if (k1.rows() != 1 || k1.cols() != 2 || k2.rows() != 1 || k2.cols() != 2) {
    throw std::invalid_argument("simulate_closed_loop: solution gains do not match the macro model");
  }
  const auto paths = build_reference_paths(spec);
  const auto cones = fimo::cones(params);
  uncertainty::Realization realization(spec.realization, spec.seed);

  ScenarioResult out;
  out.label = spec.label();
  out.spec = spec;
  fimo::MacroState x = spec.x0;
  double debt = spec.d0_debt;
  double jf = 0.0;
  double jm = 0.0;
  for (int t = 0; t <= spec.horizon; ++t) {
    const std::size_t ti = static_cast<std::size_t>(t);
    const double xv[2] = {x.z, x.pi_tilde};
    const double g = k1(0, 0) * xv[0] + k1(0, 1) * xv[1];
    const double it = k2(0, 0) * xv[0] + k2(0, 1) * xv[1];
    const auto p = realization(cones, xv);

    YearRecord r;
    r.year = spec.start_year + t;
    r.z = x.z;
    r.pi_tilde = x.pi_tilde;
    r.g = g;
    r.i_tilde = it;
    r.p1 = p[0];
    r.p2 = p[1];
    r.xi_star = paths.xi_star[ti];
    r.xi = r.xi_star * (1.0 + x.z);
    r.g_star = paths.g_star[ti];
    r.g_bar = r.g_star + g * r.xi_star;
    r.debt = debt;
    r.debt_ratio = debt / r.xi;
    jf += params.gamma1 * x.z * x.z + params.gamma2 * g * g;
    jm += params.rho1 * x.pi_tilde * x.pi_tilde + params.rho2 * it * it;
    r.cost_fiscal = jf;
    r.cost_monetary = jm;
    out.records.push_back(r);

    debt -= r.g_bar;
    x = fimo::step_dynamics(params, x, g, it, p[0], p[1]);
  }
  return out;
}

std::vector<ScenarioResult> run_all_nine(const ScenarioSpec& base, const synthesis::GuaranteedSolution& sol,
                                         const fimo::MacroParams& params) {
  std::vector<ScenarioResult> out;
  for (auto g : {GrowthVariant::kModerate, GrowthVariant::kAverage, GrowthVariant::kStrong}) {
    for (auto d : {DeficitVariant::kTight, DeficitVariant::kLoose, DeficitVariant::kPopulist}) {
      ScenarioSpec s = base;
      s.growth = g;
      s.deficit = d;
      out.push_back(simulate_closed_loop(s, sol, params));
    }
  }
  return out;
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::kDecreasing:
      return "decreasing";
    case Trend::kStabilizing:
      return "stabilizing";
    case Trend::kIncreasing:
      return "increasing";
  }
  return "unknown";
}

Trend classify_trend(const std::vector<double>& series, double dead_band, std::size_t window) {
  if (series.size() < 2) return Trend::kStabilizing;
  const std::size_t diffs = std::min(window, series.size() - 1);
  double sum = 0.0;
  for (std::size_t k = series.size() - diffs; k < series.size(); ++k) sum += series[k] - series[k - 1];
  const double mean = sum / static_cast<double>(diffs);
  if (mean > dead_band) return Trend::kIncreasing;
  if (mean < -dead_band) return Trend::kDecreasing;
  return Trend::kStabilizing;
}

std::vector<ScenarioSummary> compare_scenarios(const std::vector<ScenarioResult>& results) {
  if (results.size() < 2) throw std::invalid_argument("compare_scenarios: need at least two results");
  std::vector<ScenarioSummary> out;
  for (const auto& r : results) {
    ScenarioSummary s;
    s.label = r.label;
    const auto d = r.debt_ratios();
    if (d.empty()) throw std::invalid_argument("compare_scenarios: empty result " + r.label);
    s.min_ratio = *std::min_element(d.begin(), d.end());
    s.max_ratio = *std::max_element(d.begin(), d.end());
    s.final_ratio = d.back();
    for (std::size_t k = 1; k < d.size(); ++k) {
      const bool was_above = d[k - 1] > 0.5;
      const bool is_above = d[k] > 0.5;
      if (was_above != is_above) {
        s.cross_year = r.records[k].year;
        s.cross_direction = is_above ? "up" : "down";
        break;
      }
    }
    s.trend = classify_trend(d);
    for (std::size_t k = r.records.size(); k-- > 0;) {
      if (std::abs(r.records[k].pi_tilde) > 0.01) break;
      s.inflation_band_year = r.records[k].year;
    }
    out.push_back(s);
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const ScenarioResult& r, const std::string& header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "year,z,pi_tilde,g,i_tilde,p1,p2,xi_star,xi,g_star,g_bar,debt,debt_ratio,cost_fiscal,cost_monetary\n";
  for (const auto& y : r.records) {
    os << y.year;
    for (double v : {y.z, y.pi_tilde, y.g, y.i_tilde, y.p1, y.p2, y.xi_star, y.xi, y.g_star, y.g_bar, y.debt,
                     y.debt_ratio, y.cost_fiscal, y.cost_monetary}) {
      os << ',' << format_number(v);
    }
    os << '\n';
  }
  return os.str();
}

std::string comparison_csv(const std::vector<ScenarioSummary>& rows, const std::string& header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "scenario,min_ratio,max_ratio,final_ratio,cross_0_5_year,cross_direction,trend,inflation_band_year\n";
  for (const auto& s : rows) {
    os << s.label << ',' << format_number(s.min_ratio) << ',' << format_number(s.max_ratio) << ','
       << format_number(s.final_ratio) << ',' << (s.cross_year ? std::to_string(*s.cross_year) : "") << ','
       << s.cross_direction << ',' << to_string(s.trend) << ','
       << (s.inflation_band_year ? std::to_string(*s.inflation_band_year) : "") << '\n';
  }
  return os.str();
}

std::string debt_ratio_svg(const std::vector<const ScenarioResult*>& results, const std::string& title) {
  constexpr double kW = 640, kH = 400, kL = 60, kR = 110, kT = 40, kB = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double lo = 0.5, hi = 0.5;
  int y0 = 0, y1 = 1;
  bool first = true;
  for (const auto* r : results) {
    for (const auto& y : r->records) {
      lo = std::min(lo, y.debt_ratio);
      hi = std::max(hi, y.debt_ratio);
      if (first) {
        y0 = y1 = y.year;
        first = false;
      }
      y0 = std::min(y0, y.year);
      y1 = std::max(y1, y.year);
    }
  }
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (hi - lo + 1e-9);
  lo -= pad;
  hi += pad;
  auto px = [&](int year) { return kL + (kW - kL - kR) * (year - y0) / double(y1 - y0); };
  auto py = [&](double d) { return kT + (kH - kT - kB) * (hi - d) / (hi - lo); };
  char buf[256];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", kL, kH - kB,
                kW - kR, kH - kB);
  os << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", kL, kT, kL,
                kH - kB);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%.3f\" x2=\"%g\" y2=\"%.3f\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n", kL,
                py(0.5), kW - kR, py(0.5));
  os << buf;
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%.3f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">%.3f</text>\n",
                  kL - 6, py(v) + 3, v);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"10\">%d</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">%d</text>\n",
                kL, kH - kB + 16, y0, kW - kR, kH - kB + 16, y1);
  os << buf;
  std::size_t idx = 0;
  for (const auto* r : results) {
    const char* color = kColors[idx % (sizeof kColors / sizeof kColors[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& y : r->records) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(y.year), py(y.debt_ratio));
      os << buf;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" fill=\"%s\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                  kW - kR + 10, kT + 16.0 * static_cast<double>(idx), color, r->label.c_str());
    os << buf;
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace catchup::scenario
