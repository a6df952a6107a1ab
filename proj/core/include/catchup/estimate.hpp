#pragma once

// Least-squares estimation of the dynamic-equation coefficients from annual
// series. Expectations are proxied adaptively: E[π_{t+1}] ≈ π_t and
// E[z_{t+1}] ≈ z_t, which gives
//
//   z_{t+1}        = α1 · (−(i_t − π_t)) + α2 · (−g_t)
//   π_{t+1} − π_t  = β1 · z_t + β2 · (i_t − i*)

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catchup/fimo.hpp"
#include "catchup/linalg.hpp"

namespace catchup::estimate {

using linalg::Matrix;
using linalg::Vector;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CollinearityError : public linalg::NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct TimeSeriesTable {
  std::vector<int> years;
  std::vector<std::string> names;
  /// columns[k][row]; std::nullopt marks a missing cell.
  std::vector<std::vector<std::optional<double>>> columns;

  std::size_t rows() const { return years.size(); }
  /// Throws std::out_of_range for an unknown column.
  const std::vector<std::optional<double>>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  /// Years strictly increasing, unique names, rectangular columns.
  void validate() const;
};

/// First column is the year; the header names the rest. Blank or
/// non-numeric cells become missing. Lines starting with '#' are skipped.
TimeSeriesTable parse_table(std::istream& in);
TimeSeriesTable load_table(const std::string& path);
std::string to_csv(const TimeSeriesTable& t);

struct YearRange {
  int from = 0;
  int to = 0;
};

/// 2008–2009 and 2020–2021.
std::vector<YearRange> default_exclusions();
/// Parses "2008-2009,2020-2021"; a single year "2015" is a one-year range.
std::vector<YearRange> parse_ranges(const std::string& text);
std::string format_ranges(const std::vector<YearRange>& ranges);

bool is_excluded(int year, const std::vector<YearRange>& ranges);
TimeSeriesTable exclude_years(const TimeSeriesTable& t, const std::vector<YearRange>& ranges);

struct OlsFit {
  std::vector<std::string> names;
  Vector coefficients;
  Vector std_errors;
  double r_squared = 0.0;
  double sigma2 = 0.0;
  Vector residuals;
  std::vector<int> years;  // year t of each (t, t+1) observation used
  std::size_t rows_used = 0;
  std::size_t rows_excluded = 0;

  double coefficient(const std::string& name) const;
  double std_error(const std::string& name) const;
};

/// Plain OLS via the normal equations. Throws CollinearityError when x is
/// rank deficient, std::invalid_argument when there are too few rows.
OlsFit ols(const Matrix& x, const Vector& y, std::vector<std::string> names);

struct ColumnMap {
  std::string z = "z";
  std::string i = "i";
  std::string pi = "pi";
  std::string g = "g";
  double i_star = 0.03;
  bool intercept = false;
};

/// Observations are consecutive-year pairs (t, t+1) with every needed cell
/// present. Pairs touching an excluded year count as excluded.
OlsFit fit_real_sphere(const TimeSeriesTable& t, const std::vector<YearRange>& exclusions = default_exclusions(),
                       const ColumnMap& cols = {});
OlsFit fit_monetary(const TimeSeriesTable& t, const std::vector<YearRange>& exclusions = default_exclusions(),
                    const ColumnMap& cols = {});

/// Series generated from the adaptive-proxy equations above, with i and g
/// following simple stabilizing rules plus shocks. noise_sd adds N(0, sd²)
/// to both equations.
TimeSeriesTable synthetic_table(const fimo::MacroParams& p, int first_year, std::size_t rows, double noise_sd,
                                std::uint64_t seed);

}  // namespace catchup::estimate
