#include "catchup/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace catchup::sdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DenseTerm {
  std::size_t var;
  Matrix coefficient;
};

struct DenseLmi {
  Matrix constant;
  std::vector<DenseTerm> terms;
};

struct Interval {
  double lower = -kInf;
  double upper = kInf;
};

enum class CenterResult { kCentered, kStalled, kStepLimit };

// Cholesky of a dense SPD matrix in place of `lower`; returns false when the
// matrix is not numerically positive definite.
bool dense_cholesky(const Matrix& s, Matrix& lower) {
  const std::size_t n = s.rows();
  lower = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      lower(i, j) = v / ljj;
    }
  }
  return true;
}

Matrix cholesky_inverse(const Matrix& lower) {
  const std::size_t n = lower.rows();
  Matrix li(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = c; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = c; k < i; ++k) s -= lower(i, k) * li(k, c);
      li(i, c) = s / lower(i, i);
    }
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = j; k < n; ++k) s += li(k, i) * li(k, j);
      inv(i, j) = inv(j, i) = s;
    }
  return inv;
}

Vector cholesky_solve(const Matrix& lower, const Vector& b) {
  const std::size_t n = lower.rows();
  Vector y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
    y[i] = s / lower(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= lower(k, i) * x[k];
    x[i] = s / lower(i, i);
  }
  return x;
}

// Barrier for { z : -(F_k(x) + (t + shift)·I) ≻ 0, lower < z < upper },
// where z = x, optionally followed by the margin variable t.
class Barrier {
 public:
  Barrier(const LmiProblem& p, bool with_margin, double shift, double box, double margin_cap)
      : n_(p.num_variables + (with_margin ? 1 : 0)), shift_(shift), with_margin_(with_margin) {
    for (const auto& f : p.constraints) {
      DenseLmi d{f.constant().to_matrix(), {}};
      for (const auto& t : f.terms()) d.terms.push_back({t.variable, t.coefficient.to_matrix()});
      degree_ += static_cast<double>(f.dim());
      lmis_.push_back(std::move(d));
    }
    bounds_.resize(n_);
    for (std::size_t j = 0; j < p.num_variables; ++j) {
      Interval b{-box, box};
      if (!p.bounds.empty()) {
        if (p.bounds[j].lower) b.lower = std::max(b.lower, *p.bounds[j].lower);
        if (p.bounds[j].upper) b.upper = std::min(b.upper, *p.bounds[j].upper);
      }
      bounds_[j] = b;
    }
    if (with_margin_) bounds_.back() = Interval{-kInf, margin_cap};
    for (const auto& b : bounds_) {
      if (std::isfinite(b.lower)) degree_ += 1.0;
      if (std::isfinite(b.upper)) degree_ += 1.0;
    }
  }

  std::size_t size() const { return n_; }
  double degree() const { return degree_; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  // f = mu·c·z + barrier(z). Returns false outside the domain.
  bool evaluate(const Vector& z, const Vector& cost, double mu, double& f, Vector* grad,
                Matrix* hess) const {
    f = 0.0;
    if (grad) grad->assign(n_, 0.0);
    if (hess) *hess = Matrix(n_, n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const auto& b = bounds_[j];
      if (std::isfinite(b.lower)) {
        const double s = z[j] - b.lower;
        if (!(s > 0.0)) return false;
        f -= std::log(s);
        if (grad) (*grad)[j] -= 1.0 / s;
        if (hess) (*hess)(j, j) += 1.0 / (s * s);
      }
      if (std::isfinite(b.upper)) {
        const double s = b.upper - z[j];
        if (!(s > 0.0)) return false;
        f -= std::log(s);
        if (grad) (*grad)[j] += 1.0 / s;
        if (hess) (*hess)(j, j) += 1.0 / (s * s);
      }
    }
    const double diag_shift = shift_ + (with_margin_ ? z.back() : 0.0);
    Matrix lower;
    for (const auto& lmi : lmis_) {
      const std::size_t d = lmi.constant.rows();
      Matrix s = lmi.constant;
      for (const auto& t : lmi.terms) {
        const double zj = z[t.var];
        if (zj != 0.0) s += t.coefficient * zj;
      }
      for (std::size_t i = 0; i < d; ++i) s(i, i) += diag_shift;
      s *= -1.0;
      if (!dense_cholesky(s, lower)) return false;
      for (std::size_t i = 0; i < d; ++i) f -= 2.0 * std::log(lower(i, i));
      if (!grad && !hess) continue;

      const Matrix sinv = cholesky_inverse(lower);
      std::vector<Matrix> w;
      std::vector<std::size_t> idx;
      w.reserve(lmi.terms.size() + 1);
      for (const auto& t : lmi.terms) {
        w.push_back(sinv * t.coefficient);
        idx.push_back(t.var);
      }
      if (with_margin_) {
        w.push_back(sinv);
        idx.push_back(n_ - 1);
      }
      for (std::size_t a = 0; a < w.size(); ++a) {
        if (grad) {
          double tr = 0.0;
          for (std::size_t i = 0; i < d; ++i) tr += w[a](i, i);
          (*grad)[idx[a]] += tr;
        }
        if (hess) {
          for (std::size_t b = a; b < w.size(); ++b) {
            double tr = 0.0;
            for (std::size_t i = 0; i < d; ++i)
              for (std::size_t k = 0; k < d; ++k) tr += w[a](i, k) * w[b](k, i);
            // ids are unique within a constraint, so a != b means distinct variables
            (*hess)(idx[a], idx[b]) += tr;
            if (a != b) (*hess)(idx[b], idx[a]) += tr;
          }
        }
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      f += mu * cost[j] * z[j];
      if (grad) (*grad)[j] += mu * cost[j];
    }
    return true;
  }

  CenterResult center(Vector& z, const Vector& cost, double mu, int& steps, int max_steps) const {
    double f = 0.0;
    Vector g;
    Matrix h;
    for (int it = 0; it < 200; ++it) {
      if (!evaluate(z, cost, mu, f, &g, &h)) return CenterResult::kStalled;
      Matrix l;
      double reg = 0.0;
      while (!dense_cholesky(h, l)) {
        reg = reg == 0.0 ? 1e-14 * (1.0 + h.max_abs()) : reg * 10.0;
        for (std::size_t i = 0; i < n_; ++i) h(i, i) += reg;
        if (reg > 1e6) return CenterResult::kStalled;
      }
      Vector neg_g(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) neg_g[i] = -g[i];
      const Vector dz = cholesky_solve(l, neg_g);
      const double slope = linalg::dot(g, dz);
      if (-slope / 2.0 <= 1e-9) return CenterResult::kCentered;

      double step = 1.0;
      Vector trial(n_);
      double ft = 0.0;
      bool accepted = false;
      while (step > 1e-14) {
        for (std::size_t i = 0; i < n_; ++i) trial[i] = z[i] + step * dz[i];
        if (evaluate(trial, cost, mu, ft, nullptr, nullptr) && ft <= f + 0.25 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) return CenterResult::kStalled;
      z = trial;
      // Once f stops moving at working precision the point is as central as
      // it is going to get.
      if (f - ft <= 1e-15 * std::abs(f)) return CenterResult::kCentered;
      if (++steps > max_steps) return CenterResult::kStepLimit;
    }
    return CenterResult::kCentered;
  }

 private:
  std::size_t n_;
  double shift_;
  bool with_margin_;
  double degree_ = 0.0;
  std::vector<DenseLmi> lmis_;
  std::vector<Interval> bounds_;
};

Vector interior_start(const LmiProblem& p, const std::vector<Interval>& bounds) {
  Vector x(p.num_variables, 0.0);
  if (p.initial_guess.size() == p.num_variables) x = p.initial_guess;
  for (std::size_t j = 0; j < p.num_variables; ++j) {
    const auto& b = bounds[j];
    const double width = b.upper - b.lower;
    if (x[j] > b.lower && x[j] < b.upper) {
      // Keep a little clearance from finite bounds.
      const double pad = std::min(1e-6, 0.25 * width);
      if (x[j] - b.lower > pad && b.upper - x[j] > pad) continue;
    }
    if (std::isfinite(b.lower) && std::isfinite(b.upper)) {
      x[j] = b.lower + 0.5 * width;
    } else if (std::isfinite(b.lower)) {
      x[j] = std::max(x[j], b.lower + 1.0);
    } else if (std::isfinite(b.upper)) {
      x[j] = std::min(x[j], b.upper - 1.0);
    }
  }
  return x;
}

struct PhaseOneResult {
  Vector x;
  double margin = -kInf;
  bool step_limit = false;
  int steps = 0;
};

// Stops early once the margin reaches `target` (phase II only needs a
// strictly feasible start).
PhaseOneResult maximize_margin(const LmiProblem& p, const SolverOptions& o, double target = kInf) {
  Barrier barrier(p, /*with_margin=*/true, 0.0, o.variable_box, o.margin_cap);
  PhaseOneResult r;
  Vector x = interior_start(p, barrier.bounds());
  const double m0 = evaluate_margin(p, x);
  Vector z = x;
  z.push_back(std::min(m0 - 1.0, o.margin_cap - 1.0));
  Vector cost(barrier.size(), 0.0);
  cost.back() = -1.0;

  double mu = 1.0;
  for (int outer = 0; outer < 200; ++outer) {
    const auto res = barrier.center(z, cost, mu, r.steps, o.max_newton_steps);
    if (res == CenterResult::kStepLimit) {
      r.step_limit = true;
      break;
    }
    if (barrier.degree() / mu <= o.gap_tolerance * std::max(1.0, std::abs(z.back()))) break;
    if (z.back() >= o.margin_cap * (1.0 - 1e-9) || z.back() >= target) break;
    mu *= o.barrier_growth;
  }
  z.pop_back();
  r.x = z;
  r.margin = evaluate_margin(p, r.x);
  return r;
}

}  // namespace

void AffineMatrixFunction::add_term(VariableId variable, const SymmetricMatrix& coefficient) {
  if (coefficient.dim() != dim()) {
    throw std::invalid_argument("AffineMatrixFunction: coefficient dimension mismatch");
  }
  for (auto& t : terms_) {
    if (t.variable == variable) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back({variable, coefficient});
}

SymmetricMatrix AffineMatrixFunction::evaluate(std::span<const double> x) const {
  SymmetricMatrix out = constant_;
  for (const auto& t : terms_) {
    if (t.variable >= x.size()) throw std::out_of_range("AffineMatrixFunction: variable id out of range");
    out += t.coefficient * x[t.variable];
  }
  return out;
}

void LmiProblem::validate() const {
  if (constraints.empty()) throw std::invalid_argument("LmiProblem: no constraints");
  if (!bounds.empty() && bounds.size() != num_variables) {
    throw std::invalid_argument("LmiProblem: bounds size does not match variable count");
  }
  if (objective && objective->size() != num_variables) {
    throw std::invalid_argument("LmiProblem: objective size does not match variable count");
  }
  if (!initial_guess.empty() && initial_guess.size() != num_variables) {
    throw std::invalid_argument("LmiProblem: initial guess size does not match variable count");
  }
  std::vector<bool> referenced(num_variables, false);
  for (const auto& f : constraints) {
    if (f.dim() == 0) throw std::invalid_argument("LmiProblem: empty constraint");
    for (const auto& t : f.terms()) {
      if (t.variable >= num_variables) throw std::invalid_argument("LmiProblem: variable id out of range");
      if (t.coefficient.dim() != f.dim()) throw std::invalid_argument("LmiProblem: coefficient dimension mismatch");
      referenced[t.variable] = true;
    }
  }
  for (std::size_t j = 0; j < num_variables; ++j) {
    if (!referenced[j]) {
      throw std::invalid_argument("LmiProblem: variable " + std::to_string(j) + " appears in no constraint");
    }
    if (!bounds.empty() && bounds[j].lower && bounds[j].upper && !(*bounds[j].lower < *bounds[j].upper)) {
      throw std::invalid_argument("LmiProblem: empty bound interval for variable " + std::to_string(j));
    }
  }
}

std::string to_string(LmiStatus status) {
  switch (status) {
    case LmiStatus::kFeasible:
      return "feasible";
    case LmiStatus::kInfeasibleToTolerance:
      return "infeasible-to-tolerance";
    case LmiStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

double evaluate_margin(const LmiProblem& problem, std::span<const double> x) {
  double worst = -kInf;
  for (const auto& f : problem.constraints) worst = std::max(worst, linalg::max_eigenvalue(f.evaluate(x)));
  return -worst;
}

bool within_bounds(const LmiProblem& problem, std::span<const double> x, double tolerance) {
  if (problem.bounds.empty()) return true;
  for (std::size_t j = 0; j < problem.num_variables; ++j) {
    const auto& b = problem.bounds[j];
    if (b.lower && x[j] < *b.lower - tolerance) return false;
    if (b.upper && x[j] > *b.upper + tolerance) return false;
  }
  return true;
}

LmiSolution solve_feasibility(const LmiProblem& problem, double strictness, const SolverOptions& options) {
  if (!(strictness > 0.0)) throw std::invalid_argument("solve_feasibility: strictness must be positive");
  problem.validate();
  const auto r = maximize_margin(problem, options);
  LmiSolution s;
  s.values = r.x;
  s.margin = r.margin;
  s.newton_steps = r.steps;
  if (problem.objective) s.objective = linalg::dot(*problem.objective, s.values);
  if (r.margin >= strictness) {
    s.status = LmiStatus::kFeasible;
  } else if (r.step_limit) {
    s.status = LmiStatus::kNumericalFailure;
  } else {
    s.status = LmiStatus::kInfeasibleToTolerance;
  }
  return s;
}

LmiSolution minimize_linear(const LmiProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (!problem.objective) throw std::invalid_argument("minimize_linear: problem has no objective");
  const double strictness = options.strictness;
  // Work against a slightly larger shift so the independent eigenvalue
  // re-check never lands a rounding error below `strictness`.
  const double shift = strictness * 1.01 + 1e-13;

  auto phase_one = maximize_margin(problem, options, 1.05 * shift);
  LmiSolution s;
  s.values = phase_one.x;
  s.margin = phase_one.margin;
  s.newton_steps = phase_one.steps;
  s.objective = linalg::dot(*problem.objective, s.values);
  if (!(phase_one.margin > shift)) {
    s.status = phase_one.step_limit ? LmiStatus::kNumericalFailure : LmiStatus::kInfeasibleToTolerance;
    return s;
  }

  Barrier barrier(problem, /*with_margin=*/false, shift, options.variable_box, options.margin_cap);
  Vector z = phase_one.x;
  const Vector& cost = *problem.objective;
  double mu = 1.0;
  bool step_limit = false;
  for (int outer = 0; outer < 200; ++outer) {
    const auto res = barrier.center(z, cost, mu, s.newton_steps, options.max_newton_steps);
    if (res == CenterResult::kStepLimit) {
      step_limit = true;
      break;
    }
    const double obj = linalg::dot(cost, z);
    if (barrier.degree() / mu <= options.gap_tolerance * std::max(1.0, std::abs(obj))) break;
    mu *= options.barrier_growth;
  }
  s.values = z;
  s.objective = linalg::dot(cost, z);
  s.margin = evaluate_margin(problem, z);
  if (s.margin >= strictness) {
    s.status = LmiStatus::kFeasible;
  } else {
    s.status = step_limit ? LmiStatus::kNumericalFailure : LmiStatus::kInfeasibleToTolerance;
  }
  return s;
}

}  // namespace catchup::sdp
