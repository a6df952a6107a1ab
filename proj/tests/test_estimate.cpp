#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "catchup/estimate.hpp"

using namespace catchup;
using namespace catchup::estimate;

namespace {

TimeSeriesTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_table(in);
}

}  // namespace

TEST(LoadTable, ThreeRows) {
  const auto t = parse("year,z,i,pi,g\n2001,0.1,0.2,0.3,0.4\n2002,1,2,3,4\n# note\n\n2003,5,6,7,8\n");
  ASSERT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.years, (std::vector<int>{2001, 2002, 2003}));
  EXPECT_EQ(t.names, (std::vector<std::string>{"z", "i", "pi", "g"}));
  EXPECT_EQ(*t.column("pi")[1], 3.0);
  EXPECT_TRUE(t.has_column("g"));
  EXPECT_FALSE(t.has_column("year"));
  EXPECT_THROW(t.column("x"), std::out_of_range);
}

TEST(LoadTable, BlankAndNonNumericCellsAreMissing) {
  const auto t = parse("year,a,b\n2001,,1\n2002,n/a,2\n2003,3,\n");
  EXPECT_FALSE(t.column("a")[0].has_value());
  EXPECT_FALSE(t.column("a")[1].has_value());
  EXPECT_EQ(*t.column("a")[2], 3.0);
  EXPECT_FALSE(t.column("b")[2].has_value());
}

TEST(LoadTable, HeaderOnlyAndErrors) {
  EXPECT_EQ(parse("year,a\n").rows(), 0u);
  try {
    parse("year,a,b\n2001,1,2\n2002,1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse("year,a\n2001,1\n2001,2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("year,a,a\n"), ParseError);
  EXPECT_THROW(parse("year,a\n20x1,1\n"), ParseError);
  EXPECT_THROW(load_table("/nonexistent/file.csv"), std::runtime_error);
}

TEST(LoadTable, CsvRoundTrip) {
  const auto t = synthetic_table({}, 2000, 10, 0.0, 1);
  const auto path = std::filesystem::temp_directory_path() / "catchup_estimate_roundtrip.csv";
  {
    std::ofstream out(path);
    out << to_csv(t);
  }
  const auto back = load_table(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.years, t.years);
  EXPECT_EQ(back.names, t.names);
  for (std::size_t k = 0; k < t.names.size(); ++k) EXPECT_EQ(back.columns[k], t.columns[k]);
}

TEST(Exclusion, DefaultRangesAndCounts) {
  const auto ranges = default_exclusions();
  EXPECT_EQ(format_ranges(ranges), "2008-2009,2020-2021");
  EXPECT_TRUE(is_excluded(2008, ranges));
  EXPECT_TRUE(is_excluded(2021, ranges));
  EXPECT_FALSE(is_excluded(2010, ranges));
  const auto t = synthetic_table({}, 2005, 19, 0.0, 2);
  const auto kept = exclude_years(t, ranges);
  EXPECT_EQ(kept.rows(), 15u);
  EXPECT_EQ(exclude_years(kept, ranges).years, kept.years);
  for (int y : kept.years) EXPECT_FALSE(is_excluded(y, ranges));
}

TEST(Exclusion, ParseRanges) {
  const auto r = parse_ranges("2015, 2008-2009");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].from, 2015);
  EXPECT_EQ(r[0].to, 2015);
  EXPECT_EQ(r[1].from, 2008);
  EXPECT_EQ(r[1].to, 2009);
  EXPECT_TRUE(parse_ranges("").empty());
  EXPECT_THROW(parse_ranges("2010-2008"), std::invalid_argument);
  EXPECT_THROW(parse_ranges("abc"), std::invalid_argument);
}

TEST(Fit, NoiselessRecovery) {
  const fimo::MacroParams p;
  const auto t = synthetic_table(p, 1995, 40, 0.0, 3);
  const auto real = fit_real_sphere(t);
  const auto mon = fit_monetary(t);
  EXPECT_NEAR(real.coefficient("alpha1"), p.alpha1, 1e-10);
  EXPECT_NEAR(real.coefficient("alpha2"), p.alpha2, 1e-10);
  EXPECT_NEAR(mon.coefficient("beta1"), p.beta1, 1e-10);
  EXPECT_NEAR(mon.coefficient("beta2"), p.beta2, 1e-10);
  EXPECT_GT(real.rows_excluded, 0u);
  for (int y : real.years) {
    EXPECT_FALSE(is_excluded(y, default_exclusions()));
    EXPECT_FALSE(is_excluded(y + 1, default_exclusions()));
  }
  EXPECT_EQ(real.rows_used + real.rows_excluded, 39u);
}

TEST(Fit, NoisyRecoveryWithinThreeStandardErrors) {
  const fimo::MacroParams p;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = synthetic_table(p, 1990, 50, 0.001, seed);
    const auto real = fit_real_sphere(t);
    const auto mon = fit_monetary(t);
    hits += std::abs(real.coefficient("alpha1") - p.alpha1) <= 3.0 * real.std_error("alpha1") &&
            std::abs(mon.coefficient("beta2") - p.beta2) <= 3.0 * mon.std_error("beta2");
  }
  EXPECT_GE(hits, 90);
}

TEST(Fit, ResidualsOrthogonalToRegressors) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t rows = 30;
  linalg::Matrix x(rows, 3);
  Vector y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < 3; ++c) x(r, c) = n(rng);
    y[r] = 0.5 * x(r, 0) - 2.0 * x(r, 1) + n(rng);
  }
  const auto f = ols(x, y, {"a", "b", "c"});
  for (std::size_t c = 0; c < 3; ++c) {
    double dot = 0.0;
    for (std::size_t r = 0; r < rows; ++r) dot += x(r, c) * f.residuals[r];
    EXPECT_NEAR(dot, 0.0, 1e-10);
  }
  EXPECT_GT(f.r_squared, 0.0);
  EXPECT_LE(f.r_squared, 1.0);
  EXPECT_THROW(f.coefficient("d"), std::out_of_range);
}

TEST(Fit, CollinearAndShortDesignsRejected) {
  linalg::Matrix x(10, 2);
  Vector y(10, 1.0);
  for (std::size_t r = 0; r < 10; ++r) {
    x(r, 0) = static_cast<double>(r);
    x(r, 1) = 2.0 * static_cast<double>(r);
  }
  EXPECT_THROW(ols(x, y, {"a", "b"}), CollinearityError);
  EXPECT_THROW(ols(linalg::Matrix(3, 2), Vector(3, 0.0), {"a", "b"}), std::invalid_argument);
  EXPECT_THROW(ols(x, y, {"a"}), std::invalid_argument);
}

TEST(Fit, InterceptAndColumnMapping) {
  const fimo::MacroParams p;
  auto t = synthetic_table(p, 1995, 30, 0.0, 8);
  t.names = {"gap", "rate", "infl", "bal"};
  ColumnMap cols;
  cols.z = "gap";
  cols.i = "rate";
  cols.pi = "infl";
  cols.g = "bal";
  cols.intercept = true;
  const auto f = fit_real_sphere(t, {}, cols);
  EXPECT_NEAR(f.coefficient("alpha1"), p.alpha1, 1e-9);
  EXPECT_NEAR(f.coefficient("intercept"), 0.0, 1e-9);
  EXPECT_EQ(f.rows_excluded, 0u);
  EXPECT_THROW(fit_real_sphere(t), std::out_of_range);
}
