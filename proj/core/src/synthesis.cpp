#include "catchup/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace catchup::synthesis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Writes b at (r0, c0) and bᵀ at (c0, r0).
void place_pair(Matrix& m, std::size_t r0, std::size_t c0, const Matrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      m(r0 + i, c0 + j) += b(i, j);
      if (r0 != c0) m(c0 + j, r0 + i) += b(i, j);
    }
}

void place_diag(Matrix& m, std::size_t r0, const Matrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(r0 + i, r0 + j) += b(i, j);
}

Matrix unit_symmetric(std::size_t n, std::size_t a, std::size_t b) {
  Matrix e(n, n);
  e(a, b) = 1.0;
  e(b, a) = 1.0;
  return e;
}

struct BlockOffsets {
  std::vector<std::size_t> p;
  std::vector<std::size_t> q;
};

BlockOffsets offsets(const GameModel& m) {
  BlockOffsets o;
  std::size_t po = 0;
  std::size_t qo = 0;
  for (const auto& b : m.blocks) {
    o.p.push_back(po);
    o.q.push_back(qo);
    po += b.p_dim();
    qo += b.q_dim();
  }
  return o;
}

void check_multipliers(const GameModel& m, const Multipliers& mult) {
  if (mult.tau.size() != m.blocks.size() || mult.nu.size() != m.blocks.size()) {
    throw std::invalid_argument("multipliers must have one tau and one nu per uncertainty block");
  }
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    if (!(mult.tau[j] > 0.0) || !(mult.nu[j] > 0.0)) {
      throw std::invalid_argument("multipliers must be strictly positive");
    }
  }
}

double frob_diff(const Matrix& a, const Matrix& b) { return (a - b).frobenius_norm(); }

Vector trace_objective(const PlayerLmiLayout& layout) {
  Vector c(layout.num_variables(), 0.0);
  for (std::size_t i = 0; i < layout.state_dim; ++i) c[layout.ptilde_id(i, i)] = 1.0;
  return c;
}

struct PlayerSolve {
  bool ok = false;
  SymmetricMatrix ptilde;
  Multipliers mult;
  double margin = 0.0;
};

PlayerSolve solve_player(const GameModel& m, const Matrix& k1, const Matrix& k2, int player,
                         const std::optional<Multipliers>& fixed, const SymmetricMatrix* warm_ptilde,
                         const Multipliers* warm_mult, double strictness, const sdp::SolverOptions& base) {
  auto lmi = build_player_lmi(m, k1, k2, player, fixed);
  lmi.problem.objective = trace_objective(lmi.layout);
  if (warm_ptilde && (fixed || warm_mult)) {
    lmi.problem.initial_guess = pack_variables(lmi.layout, *warm_ptilde, fixed ? *fixed : *warm_mult);
  }
  sdp::SolverOptions o = base;
  o.strictness = strictness;
  const auto s = sdp::minimize_linear(lmi.problem, o);
  PlayerSolve r;
  if (s.status != sdp::LmiStatus::kFeasible) return r;
  r.ok = true;
  r.ptilde = unpack_ptilde(lmi.layout, s.values);
  r.mult = fixed ? *fixed : unpack_multipliers(lmi.layout, s.values);
  r.margin = s.margin;
  return r;
}

struct FixedPointState {
  std::array<SymmetricMatrix, 2> ptilde;
  std::array<Multipliers, 2> mult;
  std::array<Matrix, 2> gains;
  std::array<double, 2> margins{};
  bool have_mult = false;
};

// Gauss–Seidel style iteration: gains from the current certificates, then a
// trace-minimal certificate per player at those gains.
void run_fixed_point(const GameModel& m, FixedPointState& st, const std::array<std::optional<Multipliers>, 2>& fixed,
                     const SynthesisOptions& opt, std::vector<IterationRecord>& history) {
  auto [k1, k2] = solve_gain_equation(m, st.ptilde[0], st.ptilde[1]);
  double prev_change = kInf;
  int rises = 0;
  bool damping = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    std::array<PlayerSolve, 2> solved;
    for (int i = 0; i < 2; ++i) {
      solved[i] = solve_player(m, k1, k2, i + 1, fixed[i], &st.ptilde[i], st.have_mult ? &st.mult[i] : nullptr,
                               opt.loop_strictness, opt.solver);
      if (!solved[i].ok) {
        std::ostringstream os;
        os << "player " << i + 1 << " matrix inequality infeasible at fixed-point iteration " << it;
        throw SynthesisError(os.str(), history);
      }
    }
    IterationRecord rec;
    rec.iteration = static_cast<int>(history.size()) + 1;
    for (int i = 0; i < 2; ++i) {
      rec.ptilde_change = std::max(rec.ptilde_change, (solved[i].ptilde - st.ptilde[i]).frobenius_norm());
      rec.trace[i] = solved[i].ptilde.trace();
    }

    // Candidate certificate: the fresh solves with gains recomputed from them.
    auto [nk1, nk2] = solve_gain_equation(m, solved[0].ptilde, solved[1].ptilde);
    rec.gain_change = std::max(frob_diff(nk1, k1), frob_diff(nk2, k2));
    std::array<double, 2> margins{};
    for (int i = 0; i < 2; ++i) {
      margins[i] = certificate_margin(m, nk1, nk2, i + 1, solved[i].ptilde, solved[i].mult);
    }
    const bool small = rec.ptilde_change < opt.tolerance && rec.gain_change < opt.tolerance;
    const bool certified = margins[0] >= opt.strictness && margins[1] >= opt.strictness;

    if (rec.ptilde_change > prev_change && it > 2) ++rises;
    if (rises >= 2 && !damping && !small) damping = true;
    prev_change = rec.ptilde_change;

    for (int i = 0; i < 2; ++i) st.mult[i] = solved[i].mult;
    st.have_mult = true;

    if (small && certified) {
      for (int i = 0; i < 2; ++i) st.ptilde[i] = solved[i].ptilde;
      st.gains = {nk1, nk2};
      st.margins = margins;
      history.push_back(rec);
      return;
    }
    if (damping) {
      rec.damped = true;
      for (int i = 0; i < 2; ++i) st.ptilde[i] = 0.5 * (st.ptilde[i] + solved[i].ptilde);
      std::tie(k1, k2) = solve_gain_equation(m, st.ptilde[0], st.ptilde[1]);
    } else {
      for (int i = 0; i < 2; ++i) st.ptilde[i] = solved[i].ptilde;
      k1 = nk1;
      k2 = nk2;
    }
    history.push_back(rec);
  }
  throw SynthesisError("fixed point did not converge within " + std::to_string(opt.max_iterations) + " iterations",
                       history);
}

double player_cost_at(const GameModel& m, const Matrix& k1, const Matrix& k2, int player, const Multipliers& mult,
                      std::span<const double> x0, const SynthesisOptions& opt, const SymmetricMatrix& warm) {
  for (std::size_t j = 0; j < mult.tau.size(); ++j)
    if (!(mult.tau[j] > 0.0) || !(mult.nu[j] > 0.0) || !std::isfinite(mult.tau[j]) || !std::isfinite(mult.nu[j]))
      return kInf;
  if (!check_multiplier_inequality(m, mult, 0.0)) return kInf;
  const auto s = solve_player(m, k1, k2, player, mult, &warm, nullptr, opt.loop_strictness, opt.solver);
  if (!s.ok) return kInf;
  try {
    const auto p = recover_p(m, s.ptilde, mult);
    return linalg::quadratic_form(p, x0);
  } catch (const linalg::NumericalError&) {
    return kInf;
  }
}

// Coordinate search over log τ_j, log ν_j: a coarse scan around the current
// value, then golden-section inside the best bracket.
Multipliers refine_multipliers(const GameModel& m, const Matrix& k1, const Matrix& k2, int player,
                               Multipliers mult, std::span<const double> x0, const SynthesisOptions& opt,
                               const SymmetricMatrix& warm) {
  const std::size_t s = mult.tau.size();
  auto eval = [&](const Multipliers& mm) { return player_cost_at(m, k1, k2, player, mm, x0, opt, warm); };
  double best = eval(mult);
  constexpr int kHalfGrid = 4;
  constexpr double kStep = 1.0;
  constexpr double kGolden = 0.6180339887498949;
  constexpr double kLogTol = 1e-3;
  for (int sweep = 0; sweep < opt.refinement_sweeps; ++sweep) {
    for (std::size_t c = 0; c < 2 * s; ++c) {
      double& slot = c < s ? mult.tau[c] : mult.nu[c - s];
      const double u0 = std::log(slot);
      auto at = [&](double u) {
        Multipliers mm = mult;
        (c < s ? mm.tau[c] : mm.nu[c - s]) = std::exp(u);
        return eval(mm);
      };
      int kb = 0;
      double fb = best;
      for (int k = -kHalfGrid; k <= kHalfGrid; ++k) {
        if (k == 0) continue;
        const double f = at(u0 + k * kStep);
        if (f < fb) {
          fb = f;
          kb = k;
        }
      }
      double lo = u0 + (kb - 1) * kStep;
      double hi = u0 + (kb + 1) * kStep;
      double x1 = hi - kGolden * (hi - lo);
      double x2 = lo + kGolden * (hi - lo);
      double f1 = at(x1);
      double f2 = at(x2);
      while (hi - lo > kLogTol) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kGolden * (hi - lo);
          f1 = at(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kGolden * (hi - lo);
          f2 = at(x2);
        }
      }
      double ub = u0 + kb * kStep;
      if (f1 < fb) {
        fb = f1;
        ub = x1;
      }
      if (f2 < fb) {
        fb = f2;
        ub = x2;
      }
      if (fb < best) {
        best = fb;
        slot = std::exp(ub);
      }
    }
  }
  return mult;
}

bool is_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

std::size_t PlayerLmiLayout::ptilde_id(std::size_t r, std::size_t c) const {
  if (r > c) std::swap(r, c);
  return r * state_dim - r * (r + 1) / 2 + c;
}

std::pair<Matrix, Matrix> solve_gain_equation(const GameModel& m, const SymmetricMatrix& pt1,
                                              const SymmetricMatrix& pt2) {
  const std::size_t m1 = m.u1_dim();
  const std::size_t m2 = m.u2_dim();
  const Matrix p1 = pt1.to_matrix();
  const Matrix p2 = pt2.to_matrix();
  const Matrix b1t = m.b1.transpose();
  const Matrix b2t = m.b2.transpose();
  Matrix lhs(m1 + m2, m1 + m2);
  lhs.set_block(0, 0, m.r11.to_matrix() + b1t * p1 * m.b1);
  lhs.set_block(0, m1, b1t * p1 * m.b2);
  lhs.set_block(m1, 0, b2t * p2 * m.b1);
  lhs.set_block(m1, m1, m.r22.to_matrix() + b2t * p2 * m.b2);
  Matrix rhs(m1 + m2, m.state_dim());
  rhs.set_block(0, 0, -(b1t * p1 * m.a));
  rhs.set_block(m1, 0, -(b2t * p2 * m.a));
  Matrix k;
  try {
    k = linalg::solve_linear(lhs, rhs);
  } catch (const linalg::SingularMatrixError& e) {
    throw DegenerateGainSystemError(
        "gain equation is singular (R_ii too small or certificate collapsed): " + std::string(e.what()),
        e.condition_estimate());
  }
  return {k.block(0, 0, m1, m.state_dim()), k.block(m1, 0, m2, m.state_dim())};
}

double gain_equation_residual(const GameModel& m, const SymmetricMatrix& pt1, const SymmetricMatrix& pt2,
                              const Matrix& k1, const Matrix& k2) {
  const Matrix p1 = pt1.to_matrix();
  const Matrix p2 = pt2.to_matrix();
  const Matrix b1t = m.b1.transpose();
  const Matrix b2t = m.b2.transpose();
  const Matrix row1 = (m.r11.to_matrix() + b1t * p1 * m.b1) * k1 + b1t * p1 * m.b2 * k2;
  const Matrix row2 = b2t * p2 * m.b1 * k1 + (m.r22.to_matrix() + b2t * p2 * m.b2) * k2;
  const Matrix rhs1 = -(b1t * p1 * m.a);
  const Matrix rhs2 = -(b2t * p2 * m.a);
  const double num = std::hypot((row1 - rhs1).frobenius_norm(), (row2 - rhs2).frobenius_norm());
  const double den = 1.0 + std::hypot(rhs1.frobenius_norm(), rhs2.frobenius_norm());
  return num / den;
}

Matrix closed_loop(const GameModel& m, const Matrix& k1, const Matrix& k2) {
  return m.a + m.b1 * k1 + m.b2 * k2;
}

bool check_multiplier_inequality(const GameModel& m, const Multipliers& mult, double margin) {
  check_multipliers(m, mult);
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    const auto& b = m.blocks[j];
    const Matrix sc = game::s0_cal(b);
    const SymmetricMatrix lhs =
        game::xi0(b) * mult.nu[j] + SymmetricMatrix::symmetrize(sc.transpose() * sc) * mult.tau[j];
    if (!linalg::is_negative_definite(lhs, margin)) return false;
  }
  return true;
}

SymmetricMatrix xi(const GameModel& m, const Multipliers& mult) {
  check_multipliers(m, mult);
  std::vector<Matrix> parts;
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    const auto& b = m.blocks[j];
    const Matrix sc = game::s0_cal(b);
    const double mu = mult.tau[j] / mult.nu[j];
    parts.push_back(mult.tau[j] * (game::xi0(b).to_matrix() + mu * (sc.transpose() * sc)));
  }
  return SymmetricMatrix::symmetrize(linalg::block_diagonal(parts));
}

PlayerLmi build_player_lmi(const GameModel& m, const Matrix& k1, const Matrix& k2, int player,
                           const std::optional<Multipliers>& fixed) {
  game::check_player(player);
  m.validate();
  const std::size_t n = m.state_dim();
  if (k1.rows() != m.u1_dim() || k1.cols() != n || k2.rows() != m.u2_dim() || k2.cols() != n) {
    throw std::invalid_argument("build_player_lmi: gain dimensions do not match the model");
  }
  if (fixed) check_multipliers(m, *fixed);

  const std::size_t np = m.p_dim();
  const std::size_t nq = m.q_dim();
  const Matrix& ki = player == 1 ? k1 : k2;
  const Matrix& kother = player == 1 ? k2 : k1;
  const std::size_t nu = ki.rows();
  const std::size_t o2 = n;
  const std::size_t o3 = 2 * n;
  const std::size_t o4 = 2 * n + np;
  const std::size_t o5 = 2 * n + np + nu;
  const std::size_t dim = o5 + nq;

  PlayerLmi out;
  out.layout.state_dim = n;
  out.layout.blocks = m.blocks.size();
  out.layout.multipliers_fixed = fixed.has_value();
  const auto& L = out.layout;
  const auto off = offsets(m);
  const Matrix acl = closed_loop(m, k1, k2);
  const Matrix ht = m.h.transpose();

  // Per-block pieces of the multiplier terms.
  struct BlockTerms {
    Matrix phi_tau, phi_nu, xi0, s0c, s0c_gram;
  };
  std::vector<BlockTerms> bt;
  for (const auto& b : m.blocks) {
    const Matrix aqt = b.aq_rows.transpose();
    const Matrix sc = game::s0_cal(b);
    bt.push_back({aqt * b.r0.to_matrix() * b.aq_rows, aqt * b.aq_rows, game::xi0(b).to_matrix(), sc,
                  sc.transpose() * sc});
  }

  Matrix c5(dim, dim);
  place_diag(c5, 0, m.q(player).to_matrix() + kother.transpose() * m.r_cross(player).to_matrix() * kother);
  place_pair(c5, o4, 0, ki);
  place_diag(c5, o4, -linalg::invert_spd(m.r_own(player)).to_matrix());
  Matrix c2(np, np);
  if (fixed) {
    for (std::size_t j = 0; j < m.blocks.size(); ++j) {
      const double tau = fixed->tau[j];
      const double nuj = fixed->nu[j];
      place_diag(c5, 0, tau * bt[j].phi_tau + nuj * bt[j].phi_nu);
      place_diag(c5, o3 + off.p[j], tau * bt[j].xi0);
      place_pair(c5, o5 + off.q[j], o3 + off.p[j], tau * bt[j].s0c);
      place_diag(c5, o5 + off.q[j], -nuj * Matrix::identity(m.blocks[j].q_dim()));
      place_diag(c2, off.p[j], nuj * bt[j].xi0 + tau * bt[j].s0c_gram);
    }
  }

  sdp::AffineMatrixFunction f5(SymmetricMatrix::symmetrize(c5));
  sdp::AffineMatrixFunction f2(SymmetricMatrix::symmetrize(c2));

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const Matrix e = unit_symmetric(n, a, b);
      Matrix t(dim, dim);
      place_diag(t, 0, -e);
      place_diag(t, o2, -e);
      place_pair(t, o2, 0, e * acl);
      place_pair(t, o3, 0, ht * e);
      place_diag(t, o3, -(ht * e * m.h));
      f5.add_term(L.ptilde_id(a, b), SymmetricMatrix::symmetrize(t));
    }
  }
  if (!fixed) {
    for (std::size_t j = 0; j < m.blocks.size(); ++j) {
      Matrix t(dim, dim);
      place_diag(t, 0, bt[j].phi_tau);
      place_diag(t, o3 + off.p[j], bt[j].xi0);
      place_pair(t, o5 + off.q[j], o3 + off.p[j], bt[j].s0c);
      f5.add_term(L.tau_id(j), SymmetricMatrix::symmetrize(t));

      Matrix v(dim, dim);
      place_diag(v, 0, bt[j].phi_nu);
      place_diag(v, o5 + off.q[j], -Matrix::identity(m.blocks[j].q_dim()));
      f5.add_term(L.nu_id(j), SymmetricMatrix::symmetrize(v));

      Matrix t2(np, np);
      place_diag(t2, off.p[j], bt[j].s0c_gram);
      Matrix v2(np, np);
      place_diag(v2, off.p[j], bt[j].xi0);
      f2.add_term(L.tau_id(j), SymmetricMatrix::symmetrize(t2));
      f2.add_term(L.nu_id(j), SymmetricMatrix::symmetrize(v2));
    }
  }

  auto& pr = out.problem;
  pr.num_variables = L.num_variables();
  pr.constraints = {std::move(f5), std::move(f2)};
  pr.bounds.assign(pr.num_variables, sdp::VariableBounds{});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) pr.variable_names.push_back("ptilde" + std::to_string(a) + std::to_string(b));
  if (!fixed) {
    for (std::size_t j = 0; j < m.blocks.size(); ++j) {
      pr.bounds[L.tau_id(j)].lower = 0.0;
      pr.bounds[L.nu_id(j)].lower = 0.0;
    }
    for (std::size_t j = 0; j < m.blocks.size(); ++j) pr.variable_names.push_back("tau" + std::to_string(j + 1));
    for (std::size_t j = 0; j < m.blocks.size(); ++j) pr.variable_names.push_back("nu" + std::to_string(j + 1));
  }
  return out;
}

Vector pack_variables(const PlayerLmiLayout& layout, const SymmetricMatrix& ptilde, const Multipliers& mult) {
  Vector x(layout.num_variables(), 0.0);
  for (std::size_t a = 0; a < layout.state_dim; ++a)
    for (std::size_t b = a; b < layout.state_dim; ++b) x[layout.ptilde_id(a, b)] = ptilde(a, b);
  if (!layout.multipliers_fixed) {
    for (std::size_t j = 0; j < layout.blocks; ++j) {
      x[layout.tau_id(j)] = mult.tau.at(j);
      x[layout.nu_id(j)] = mult.nu.at(j);
    }
  }
  return x;
}

SymmetricMatrix unpack_ptilde(const PlayerLmiLayout& layout, std::span<const double> x) {
  SymmetricMatrix p(layout.state_dim);
  for (std::size_t a = 0; a < layout.state_dim; ++a)
    for (std::size_t b = a; b < layout.state_dim; ++b) p.set(a, b, x[layout.ptilde_id(a, b)]);
  return p;
}

Multipliers unpack_multipliers(const PlayerLmiLayout& layout, std::span<const double> x) {
  if (layout.multipliers_fixed) throw std::logic_error("unpack_multipliers: layout has fixed multipliers");
  Multipliers m;
  for (std::size_t j = 0; j < layout.blocks; ++j) {
    m.tau.push_back(x[layout.tau_id(j)]);
    m.nu.push_back(x[layout.nu_id(j)]);
  }
  return m;
}

SymmetricMatrix recover_p(const GameModel& m, const SymmetricMatrix& ptilde, const Multipliers& mult) {
  const SymmetricMatrix x = xi(m, mult);
  if (!linalg::is_negative_definite(x, 0.0)) {
    throw CertificateInconsistencyError("recover_p: Xi(tau, mu) is not negative definite");
  }
  Matrix lower;
  if (!linalg::try_cholesky(ptilde, lower)) {
    throw CertificateInconsistencyError("recover_p: certificate Ptilde is not positive definite");
  }
  const SymmetricMatrix xinv = linalg::invert_spd(-1.0 * x) * -1.0;
  const SymmetricMatrix pinv = linalg::invert_spd(ptilde) - linalg::congruence(m.h.transpose(), xinv);
  if (!linalg::try_cholesky(pinv, lower)) {
    throw CertificateInconsistencyError("recover_p: implied P^-1 = Ptilde^-1 - H Xi^-1 H^T is not positive definite");
  }
  return linalg::invert_spd(pinv);
}

SymmetricMatrix ptilde_from_p(const GameModel& m, const SymmetricMatrix& p, const Multipliers& mult) {
  const SymmetricMatrix x = xi(m, mult);
  const SymmetricMatrix xinv = linalg::invert_spd(-1.0 * x) * -1.0;
  return linalg::invert_spd(linalg::invert_spd(p) + linalg::congruence(m.h.transpose(), xinv));
}

double GuaranteedSolution::cost(int player, std::span<const double> x0) const {
  return linalg::quadratic_form(p[game::check_player(player) - 1], x0);
}

double guaranteed_cost(const GuaranteedSolution& sol, int player, std::span<const double> x0) {
  return sol.cost(player, x0);
}

std::array<SymmetricMatrix, 2> nominal_value_iteration(const GameModel& m, int max_iterations, double tolerance) {
  std::array<SymmetricMatrix, 2> p{m.q1, m.q2};
  for (int it = 0; it < max_iterations; ++it) {
    const auto [k1, k2] = solve_gain_equation(m, p[0], p[1]);
    const Matrix acl = closed_loop(m, k1, k2);
    std::array<SymmetricMatrix, 2> next;
    double change = 0.0;
    double scale = 1.0;
    for (int i = 0; i < 2; ++i) {
      const Matrix& ki = i == 0 ? k1 : k2;
      const Matrix& ko = i == 0 ? k2 : k1;
      next[i] = m.q(i + 1) + linalg::congruence(ki, m.r_own(i + 1)) + linalg::congruence(ko, m.r_cross(i + 1)) +
                linalg::congruence(acl, p[i]);
      if (!next[i].all_finite()) throw linalg::ConvergenceError("nominal value iteration diverged");
      change = std::max(change, (next[i] - p[i]).frobenius_norm());
      scale = std::max(scale, next[i].frobenius_norm());
    }
    p = next;
    if (change <= tolerance * scale) return p;
  }
  throw linalg::ConvergenceError("nominal value iteration did not converge");
}

double certificate_margin(const GameModel& m, const Matrix& k1, const Matrix& k2, int player,
                          const SymmetricMatrix& ptilde, const Multipliers& mult) {
  const auto lmi = build_player_lmi(m, k1, k2, player, mult);
  const Vector x = pack_variables(lmi.layout, ptilde, mult);
  return sdp::evaluate_margin(lmi.problem, x);
}

GuaranteedSolution synthesize(const GameModel& m, std::span<const double> x0, const SynthesisOptions& opt) {
  m.validate();
  if (x0.size() != m.state_dim()) throw std::invalid_argument("synthesize: x0 dimension does not match the model");
  if (opt.check_assumptions) {
    const auto a1 = game::check_assumption1(m);
    if (!a1.passed) throw AssumptionError("Assumption 1 failed: " + a1.message);
    const auto a2 = game::check_assumption2(m);
    if (!a2.passed()) throw AssumptionError("Assumption 2 failed: " + a2.message);
  }

  std::vector<IterationRecord> history;
  FixedPointState st;
  st.ptilde = nominal_value_iteration(m);
  // A zero nominal value (e.g. a player with no stake) would stall the warm start.
  for (auto& p : st.ptilde)
    if (!linalg::is_positive_definite(p, 1e-12)) p += SymmetricMatrix::identity(m.state_dim()) * 1e-6;

  run_fixed_point(m, st, {std::nullopt, std::nullopt}, opt, history);

  auto assemble = [&](const FixedPointState& s) {
    GuaranteedSolution sol;
    sol.gains = s.gains;
    sol.ptilde = s.ptilde;
    sol.multipliers = s.mult;
    sol.margins = s.margins;
    for (int i = 0; i < 2; ++i) sol.p[i] = recover_p(m, s.ptilde[i], s.mult[i]);
    sol.gain_residual = gain_equation_residual(m, s.ptilde[0], s.ptilde[1], s.gains[0], s.gains[1]);
    sol.closed_loop_radius = linalg::spectral_radius(closed_loop(m, s.gains[0], s.gains[1]));
    return sol;
  };

  GuaranteedSolution best = assemble(st);
  auto total = [&](const GuaranteedSolution& s) { return s.cost(1, x0) + s.cost(2, x0); };

  if (opt.refine_multipliers && !is_zero(x0)) {
    for (int round = 0; round < opt.refinement_rounds; ++round) {
      std::array<std::optional<Multipliers>, 2> fixed;
      for (int i = 0; i < 2; ++i) {
        fixed[i] = refine_multipliers(m, st.gains[0], st.gains[1], i + 1, st.mult[i], x0, opt, st.ptilde[i]);
      }
      FixedPointState trial = st;
      try {
        run_fixed_point(m, trial, fixed, opt, history);
      } catch (const SynthesisError&) {
        break;
      }
      GuaranteedSolution cand;
      try {
        cand = assemble(trial);
      } catch (const linalg::NumericalError&) {
        break;
      }
      if (total(cand) < total(best)) {
        best = cand;
        st = trial;
      } else {
        break;
      }
    }
  }

  // The loop runs at loop_strictness so gain updates cannot break the
  // certificate; once settled, tighten towards the required strictness.
  if (opt.polish && opt.loop_strictness > 2.0 * opt.strictness) {
    SynthesisOptions tight = opt;
    tight.loop_strictness = 2.0 * opt.strictness;
    FixedPointState trial = st;
    try {
      run_fixed_point(m, trial, {trial.mult[0], trial.mult[1]}, tight, history);
      GuaranteedSolution cand = assemble(trial);
      if (is_zero(x0) || total(cand) <= total(best)) best = cand;
    } catch (const linalg::NumericalError&) {
    }
  }

  best.history = history;
  best.iterations = static_cast<int>(history.size());
  if (!(best.closed_loop_radius < 1.0)) {
    throw SynthesisError("synthesized gains do not stabilize the nominal closed loop", history);
  }
  for (int i = 0; i < 2; ++i) {
    if (!(best.margins[i] >= opt.strictness)) {
      throw SynthesisError("certificate margin below the required strictness", history);
    }
  }
  return best;
}

}  // namespace catchup::synthesis
