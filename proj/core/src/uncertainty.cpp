#include "catchup/uncertainty.hpp"

#include <cmath>
#include <stdexcept>

namespace catchup::uncertainty {

namespace {

constexpr double kTolerance = 1e-12;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

}  // namespace

double ConeSpec::output(std::span<const double> x) const {
  if (x.size() != output_row.size()) throw std::invalid_argument("ConeSpec: state dimension mismatch");
  return linalg::dot(output_row, x);
}

Interval ConeSpec::interval(double y) const {
  if (kind == ConeKind::kSymmetric) return {-scale * std::abs(y), scale * std::abs(y)};
  return {scale * (y - std::abs(y)), scale * (y + std::abs(y))};
}

ConeSpec symmetric_cone(Vector output_row) {
  return {ConeKind::kSymmetric, std::move(output_row), 1.0 / std::sqrt(2.0)};
}

ConeSpec one_sided_cone(Vector output_row) { return {ConeKind::kOneSided, std::move(output_row), 0.5}; }

double eval_p1_sin(double y1) {
  if (y1 == 0.0) return 0.0;
  return std::abs(y1) / std::sqrt(2.0) * std::sin(1.0 / y1);
}

double eval_p2_sin(double y2) {
  if (y2 == 0.0) return 0.0;
  return 0.5 * y2 + 0.5 * std::abs(y2) * std::sin(1.0 / y2);
}

double sample_admissible(const ConeSpec& cone, std::span<const double> x, std::mt19937_64& rng) {
  const auto iv = cone.interval_at(x);
  return uniform(rng, iv.lower, iv.upper);
}

double sample_admissible(const ConeSpec& cone, std::span<const double> x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_admissible(cone, x, rng);
}

bool verify_cone(const ConeSpec& cone, std::span<const double> x, double p) {
  const auto iv = cone.interval_at(x);
  return p >= iv.lower - kTolerance && p <= iv.upper + kTolerance;
}

std::string to_string(RealizationKind kind) {
  switch (kind) {
    case RealizationKind::kZero:
      return "zero";
    case RealizationKind::kSin:
      return "sin";
    case RealizationKind::kRandom:
      return "random";
    case RealizationKind::kLinear:
      return "linear";
  }
  return "unknown";
}

RealizationKind parse_realization(const std::string& name) {
  if (name == "zero") return RealizationKind::kZero;
  if (name == "sin") return RealizationKind::kSin;
  if (name == "random") return RealizationKind::kRandom;
  if (name == "linear") return RealizationKind::kLinear;
  throw std::invalid_argument("unknown realization '" + name + "' (expected zero, sin, random or linear)");
}

Realization::Realization(RealizationKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

Vector Realization::operator()(std::span<const ConeSpec> cones, std::span<const double> x) {
  Vector p(cones.size(), 0.0);
  for (std::size_t j = 0; j < cones.size(); ++j) {
    const auto& c = cones[j];
    const double y = c.output(x);
    switch (kind_) {
      case RealizationKind::kZero:
        break;
      case RealizationKind::kSin:
        p[j] = c.kind == ConeKind::kSymmetric ? eval_p1_sin(y) : eval_p2_sin(y);
        break;
      case RealizationKind::kRandom:
        p[j] = sample_admissible(c, x, rng_);
        break;
      case RealizationKind::kLinear: {
        const double coef = c.kind == ConeKind::kSymmetric ? uniform(rng_, -c.scale, c.scale) : uniform(rng_, 0.0, 2.0 * c.scale);
        p[j] = coef * y;
        break;
      }
    }
  }
  return p;
}

}  // namespace catchup::uncertainty
