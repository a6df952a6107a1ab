#pragma once

// Small dense linear matrix inequalities.
//
// Every constraint is an affine symmetric-matrix function F(x) required to be
// negative semidefinite. "Strict" inequalities are realised as
// F(x) ≼ -strictness·I. The solver is a log-det barrier interior-point method:
// a phase-I pass maximises the common margin t in F_k(x) + t·I ≼ 0, and
// minimize_linear then runs a phase-II barrier on the linear objective starting
// from the phase-I point.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catchup/linalg.hpp"

namespace catchup::sdp {

using linalg::Matrix;
using linalg::SymmetricMatrix;
using linalg::Vector;
using VariableId = std::size_t;

struct AffineTerm {
  VariableId variable;
  SymmetricMatrix coefficient;
};

class AffineMatrixFunction {
 public:
  AffineMatrixFunction() = default;
  explicit AffineMatrixFunction(SymmetricMatrix constant) : constant_(std::move(constant)) {}

  /// Adds coefficient·x[variable]. A repeated id accumulates into the
  /// existing term, so ids stay unique.
  void add_term(VariableId variable, const SymmetricMatrix& coefficient);

  std::size_t dim() const { return constant_.dim(); }
  const SymmetricMatrix& constant() const { return constant_; }
  SymmetricMatrix& constant() { return constant_; }
  const std::vector<AffineTerm>& terms() const { return terms_; }

  SymmetricMatrix evaluate(std::span<const double> x) const;

 private:
  SymmetricMatrix constant_;
  std::vector<AffineTerm> terms_;
};

struct VariableBounds {
  std::optional<double> lower;
  std::optional<double> upper;
};

struct LmiProblem {
  std::size_t num_variables = 0;
  std::vector<AffineMatrixFunction> constraints;  // each F_k(x) ≼ 0
  std::vector<VariableBounds> bounds;             // empty, or one per variable
  std::optional<Vector> objective;                // minimise objective·x
  Vector initial_guess;                           // optional warm start
  std::vector<std::string> variable_names;        // optional, for diagnostics

  /// Throws std::invalid_argument when the problem is malformed.
  void validate() const;
};

enum class LmiStatus { kFeasible, kInfeasibleToTolerance, kNumericalFailure };

std::string to_string(LmiStatus status);

struct LmiSolution {
  Vector values;
  /// -max_k λ_max(F_k(values)); positive means strictly feasible.
  double margin = 0.0;
  LmiStatus status = LmiStatus::kNumericalFailure;
  double objective = 0.0;
  int newton_steps = 0;
};

struct SolverOptions {
  /// Required margin for the point returned by minimize_linear.
  double strictness = 1e-8;
  /// Implicit |x_j| ≤ box keeps the barrier problem bounded.
  double variable_box = 1e6;
  /// Phase I stops pushing the margin beyond this value.
  double margin_cap = 1.0;
  /// Relative duality-gap target for the barrier path.
  double gap_tolerance = 1e-10;
  int max_newton_steps = 4000;
  double barrier_growth = 10.0;
};

/// Maximises the margin; feasible iff the margin reaches `strictness`.
LmiSolution solve_feasibility(const LmiProblem& problem, double strictness,
                              const SolverOptions& options = {});

/// Minimises the objective over {x : F_k(x) ≼ -options.strictness·I, bounds}.
LmiSolution minimize_linear(const LmiProblem& problem, const SolverOptions& options = {});

/// Margin re-evaluated from scratch with the symmetric eigensolver; shares no
/// code with the barrier iterations.
double evaluate_margin(const LmiProblem& problem, std::span<const double> x);

bool within_bounds(const LmiProblem& problem, std::span<const double> x, double tolerance = 0.0);

}  // namespace catchup::sdp
