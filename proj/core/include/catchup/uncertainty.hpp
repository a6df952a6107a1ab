#pragma once

// Cone-bounded uncertainties and concrete admissible realizations.
//
// A symmetric cone bounds p by |p| ≤ s·|y|; a one-sided cone keeps p between
// s(y − |y|) and s(y + |y|), i.e. between 0 and y when s = 1/2. Here y = row·x.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "catchup/linalg.hpp"

namespace catchup::uncertainty {

using linalg::Vector;

enum class ConeKind { kSymmetric, kOneSided };

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct ConeSpec {
  ConeKind kind = ConeKind::kSymmetric;
  Vector output_row;
  double scale = 0.0;

  double output(std::span<const double> x) const;
  Interval interval(double y) const;
  Interval interval_at(std::span<const double> x) const { return interval(output(x)); }
};

/// |p| ≤ |y|/√2.
ConeSpec symmetric_cone(Vector output_row);
/// p between 0 and y.
ConeSpec one_sided_cone(Vector output_row);

/// (|y1|/√2)·sin(1/y1), 0 at y1 = 0.
double eval_p1_sin(double y1);
/// y2/2 + (|y2|/2)·sin(1/y2), 0 at y2 = 0.
double eval_p2_sin(double y2);

/// Uniform draw on the cone interval at x.
double sample_admissible(const ConeSpec& cone, std::span<const double> x, std::mt19937_64& rng);
double sample_admissible(const ConeSpec& cone, std::span<const double> x, std::uint64_t seed);

/// Cone membership with tolerance 1e-12.
bool verify_cone(const ConeSpec& cone, std::span<const double> x, double p);

enum class RealizationKind { kZero, kSin, kRandom, kLinear };

std::string to_string(RealizationKind kind);
/// Accepts "zero", "sin", "random", "linear". Throws std::invalid_argument.
RealizationKind parse_realization(const std::string& name);

/// Stateful realization of p_t = (p_1, …, p_s) along a trajectory.
///
/// kSin uses eval_p1_sin on symmetric cones and eval_p2_sin on one-sided ones.
/// kLinear draws a coefficient c_t per step and sets p = c_t·y, with c_t
/// uniform on [−scale, scale] (symmetric) or [0, 2·scale] (one-sided).
class Realization {
 public:
  explicit Realization(RealizationKind kind, std::uint64_t seed = 0);

  RealizationKind kind() const { return kind_; }
  Vector operator()(std::span<const ConeSpec> cones, std::span<const double> x);

 private:
  RealizationKind kind_;
  std::mt19937_64 rng_;
};

}  // namespace catchup::uncertainty
