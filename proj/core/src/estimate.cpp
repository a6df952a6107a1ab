#include "catchup/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "catchup/scenario.hpp"

namespace catchup::estimate {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct Design {
  Matrix x;
  Vector y;
  std::vector<int> years;
  std::size_t excluded = 0;
};

// Collects the (t, t+1) pairs; `row` fills one regression row from the two
// table rows and returns false when a needed cell is missing.
template <typename RowFn>
Design build_design(const TimeSeriesTable& t, const std::vector<YearRange>& exclusions, std::size_t k, RowFn row) {
  t.validate();
  std::vector<double> xs;
  Design d;
  for (std::size_t r = 0; r + 1 < t.rows(); ++r) {
    if (t.years[r + 1] != t.years[r] + 1) continue;
    Vector xrow(k);
    double yv = 0.0;
    if (!row(r, xrow, yv)) continue;
    if (is_excluded(t.years[r], exclusions) || is_excluded(t.years[r + 1], exclusions)) {
      ++d.excluded;
      continue;
    }
    xs.insert(xs.end(), xrow.begin(), xrow.end());
    d.y.push_back(yv);
    d.years.push_back(t.years[r]);
  }
  d.x = Matrix(d.y.size(), k, std::move(xs));
  return d;
}

OlsFit finish(Design d, std::vector<std::string> names) {
  OlsFit f = ols(d.x, d.y, std::move(names));
  f.years = std::move(d.years);
  f.rows_excluded = d.excluded;
  return f;
}

}  // namespace

const std::vector<std::optional<double>>& TimeSeriesTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return columns[k];
  throw std::out_of_range("no column named '" + name + "'");
}

bool TimeSeriesTable::has_column(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

void TimeSeriesTable::validate() const {
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate column name '" + n + "'");
  if (columns.size() != names.size()) throw std::invalid_argument("column count does not match names");
  for (const auto& c : columns)
    if (c.size() != years.size()) throw std::invalid_argument("ragged table column");
  for (std::size_t r = 1; r < years.size(); ++r)
    if (years[r] <= years[r - 1]) throw std::invalid_argument("years must be strictly increasing");
}

TimeSeriesTable parse_table(std::istream& in) {
  TimeSeriesTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto cells = split(s);
    if (!have_header) {
      if (cells.size() < 1) throw ParseError("empty header", lineno);
      std::set<std::string> seen;
      for (std::size_t k = 1; k < cells.size(); ++k) {
        if (cells[k].empty()) throw ParseError("empty column name", lineno);
        if (!seen.insert(cells[k]).second) throw ParseError("duplicate column '" + cells[k] + "'", lineno);
        t.names.push_back(cells[k]);
      }
      t.columns.resize(t.names.size());
      have_header = true;
      continue;
    }
    if (cells.size() != t.names.size() + 1) {
      throw ParseError("expected " + std::to_string(t.names.size() + 1) + " fields, found " +
                           std::to_string(cells.size()),
                       lineno);
    }
    const auto year = parse_cell(cells[0]);
    if (!year || *year != std::floor(*year)) throw ParseError("year '" + cells[0] + "' is not an integer", lineno);
    const int y = static_cast<int>(*year);
    if (!t.years.empty() && y <= t.years.back()) throw ParseError("years must be strictly increasing", lineno);
    t.years.push_back(y);
    for (std::size_t k = 0; k < t.names.size(); ++k) t.columns[k].push_back(parse_cell(cells[k + 1]));
  }
  if (!have_header) throw ParseError("missing header", lineno == 0 ? 1 : lineno);
  return t;
}

TimeSeriesTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_table(in);
}

std::string to_csv(const TimeSeriesTable& t) {
  std::ostringstream os;
  os << "year";
  for (const auto& n : t.names) os << ',' << n;
  os << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    os << t.years[r];
    for (const auto& c : t.columns) {
      os << ',';
      if (c[r]) os << scenario::format_number(*c[r]);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<YearRange> default_exclusions() { return {{2008, 2009}, {2020, 2021}}; }

std::vector<YearRange> parse_ranges(const std::string& text) {
  std::vector<YearRange> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    try {
      YearRange r;
      if (dash == std::string::npos) {
        r.from = r.to = std::stoi(item);
      } else {
        r.from = std::stoi(item.substr(0, dash));
        r.to = std::stoi(item.substr(dash + 1));
      }
      if (r.from > r.to) throw std::invalid_argument("range '" + item + "' is reversed");
      out.push_back(r);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("cannot parse year range '" + item + "'");
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("cannot parse year range '" + item + "'");
    }
  }
  return out;
}

std::string format_ranges(const std::vector<YearRange>& ranges) {
  std::string s;
  for (const auto& r : ranges) {
    if (!s.empty()) s += ',';
    s += std::to_string(r.from) + "-" + std::to_string(r.to);
  }
  return s;
}

bool is_excluded(int year, const std::vector<YearRange>& ranges) {
  return std::any_of(ranges.begin(), ranges.end(), [&](const YearRange& r) { return year >= r.from && year <= r.to; });
}

TimeSeriesTable exclude_years(const TimeSeriesTable& t, const std::vector<YearRange>& ranges) {
  for (const auto& r : ranges)
    if (r.from > r.to) throw std::invalid_argument("exclude_years: reversed range");
  TimeSeriesTable out;
  out.names = t.names;
  out.columns.resize(t.names.size());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (is_excluded(t.years[r], ranges)) continue;
    out.years.push_back(t.years[r]);
    for (std::size_t k = 0; k < t.columns.size(); ++k) out.columns[k].push_back(t.columns[k][r]);
  }
  return out;
}

double OlsFit::coefficient(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return coefficients[k];
  throw std::out_of_range("no coefficient named '" + name + "'");
}

double OlsFit::std_error(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return std_errors[k];
  throw std::out_of_range("no coefficient named '" + name + "'");
}

OlsFit ols(const Matrix& x, const Vector& y, std::vector<std::string> names) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (names.size() != k) throw std::invalid_argument("ols: one name per regressor required");
  if (y.size() != n) throw std::invalid_argument("ols: response length does not match design rows");
  if (n < k + 2) {
    throw std::invalid_argument("ols: " + std::to_string(n) + " observations for " + std::to_string(k) +
                                " regressors (need at least " + std::to_string(k + 2) + ")");
  }
  if (linalg::numerical_rank(x, 1e-9) < k) throw CollinearityError("ols: design matrix is rank deficient");

  const Matrix xt = x.transpose();
  const Matrix xtx = xt * x;
  const Matrix xty = xt * Matrix::column(y);
  Matrix beta;
  Matrix inv;
  try {
    beta = linalg::solve_linear(xtx, xty);
    inv = linalg::inverse(xtx);
  } catch (const linalg::SingularMatrixError&) {
    throw CollinearityError("ols: normal equations are singular");
  }

  OlsFit f;
  f.names = std::move(names);
  f.rows_used = n;
  for (std::size_t j = 0; j < k; ++j) f.coefficients.push_back(beta(j, 0));
  const Vector fitted = x * std::span<const double>(f.coefficients);
  double rss = 0.0;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double tss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - fitted[i];
    f.residuals.push_back(e);
    rss += e * e;
    tss += (y[i] - mean) * (y[i] - mean);
  }
  f.sigma2 = rss / static_cast<double>(n - k);
  for (std::size_t j = 0; j < k; ++j) f.std_errors.push_back(std::sqrt(std::max(0.0, f.sigma2 * inv(j, j))));
  f.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  return f;
}

OlsFit fit_real_sphere(const TimeSeriesTable& t, const std::vector<YearRange>& exclusions, const ColumnMap& cols) {
  const auto& z = t.column(cols.z);
  const auto& i = t.column(cols.i);
  const auto& pi = t.column(cols.pi);
  const auto& g = t.column(cols.g);
  const std::size_t k = cols.intercept ? 3 : 2;
  auto d = build_design(t, exclusions, k, [&](std::size_t r, Vector& xr, double& yv) {
    if (!z[r + 1] || !i[r] || !pi[r] || !g[r]) return false;
    xr[0] = -(*i[r] - *pi[r]);
    xr[1] = -*g[r];
    if (cols.intercept) xr[2] = 1.0;
    yv = *z[r + 1];
    return true;
  });
  std::vector<std::string> names{"alpha1", "alpha2"};
  if (cols.intercept) names.push_back("intercept");
  return finish(std::move(d), std::move(names));
}

OlsFit fit_monetary(const TimeSeriesTable& t, const std::vector<YearRange>& exclusions, const ColumnMap& cols) {
  const auto& z = t.column(cols.z);
  const auto& i = t.column(cols.i);
  const auto& pi = t.column(cols.pi);
  const std::size_t k = cols.intercept ? 3 : 2;
  auto d = build_design(t, exclusions, k, [&](std::size_t r, Vector& xr, double& yv) {
    if (!pi[r + 1] || !pi[r] || !z[r] || !i[r]) return false;
    xr[0] = *z[r];
    xr[1] = *i[r] - cols.i_star;
    if (cols.intercept) xr[2] = 1.0;
    yv = *pi[r + 1] - *pi[r];
    return true;
  });
  std::vector<std::string> names{"beta1", "beta2"};
  if (cols.intercept) names.push_back("intercept");
  return finish(std::move(d), std::move(names));
}

TimeSeriesTable synthetic_table(const fimo::MacroParams& p, int first_year, std::size_t rows, double noise_sd,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> shock(0.0, 0.01);
  std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
  auto eps = [&]() { return noise_sd > 0.0 ? noise(rng) : 0.0; };

  TimeSeriesTable t;
  t.names = {"z", "i", "pi", "g"};
  t.columns.resize(4);
  double z = 0.01;
  double pi = p.pi_star + 0.02;
  for (std::size_t r = 0; r < rows; ++r) {
    const double i = p.i_star - 0.8 * (pi - p.pi_star) + shock(rng);
    const double g = 0.3 * z + shock(rng);
    t.years.push_back(first_year + static_cast<int>(r));
    t.columns[0].push_back(z);
    t.columns[1].push_back(i);
    t.columns[2].push_back(pi);
    t.columns[3].push_back(g);
    const double z_next = -p.alpha1 * (i - pi) - p.alpha2 * g + eps();
    const double pi_next = pi + p.beta1 * z + p.beta2 * (i - p.i_star) + eps();
    z = z_next;
    pi = pi_next;
  }
  return t;
}

}  // namespace catchup::estimate
