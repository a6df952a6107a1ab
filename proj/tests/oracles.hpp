#pragma once

// Reference computations for the tests. These go through Eigen and plain
// loops, never through the library's own solvers, so agreement means
// something.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "catchup/game.hpp"
#include "catchup/linalg.hpp"
#include "catchup/synthesis.hpp"

namespace oracle {

using catchup::linalg::Matrix;
using catchup::linalg::SymmetricMatrix;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline Eigen::MatrixXd to_eigen(const SymmetricMatrix& m) { return to_eigen(m.to_matrix()); }

inline double max_eig(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Roots of λ² − tλ + d for a 2×2 matrix with trace t and determinant d.
inline std::array<std::complex<double>, 2> eig2(double a, double b, double c, double d) {
  const double t = a + d;
  const double det = a * d - b * c;
  const std::complex<double> disc = std::sqrt(std::complex<double>(t * t - 4.0 * det));
  return {(t + disc) / 2.0, (t - disc) / 2.0};
}

/// Companion matrix of the monic polynomial with the given roots (complex
/// roots must come in conjugate pairs).
inline Matrix companion(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] -= r * c[k];
    }
    c = next;
  }
  const std::size_t n = roots.size();
  Matrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(0, k) = -c[k + 1].real();
  for (std::size_t k = 1; k < n; ++k) m(k, k - 1) = 1.0;
  return m;
}

/// Discrete LQR gain u = Kx by plain Riccati value iteration.
inline Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                                 const Eigen::MatrixXd& r, int iterations = 200000) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(b.cols(), a.cols());
  for (int it = 0; it < iterations; ++it) {
    k = -(r + b.transpose() * p * b).ldlt().solve(b.transpose() * p * a);
    const Eigen::MatrixXd acl = a + b * k;
    const Eigen::MatrixXd next = q + k.transpose() * r * k + acl.transpose() * p * acl;
    const double change = (next - p).norm();
    p = next;
    if (change < 1e-15 * (1.0 + p.norm())) break;
  }
  return k;
}

/// Smallest x in [lo, hi] with f(x) ≤ 0 for f nonincreasing, by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// The player inequality written out densely from its block definition.
inline Eigen::MatrixXd player_lmi(const catchup::game::GameModel& m, const Matrix& k1m, const Matrix& k2m, int player,
                                  const SymmetricMatrix& ptilde, const catchup::synthesis::Multipliers& mult) {
  const Eigen::MatrixXd a = to_eigen(m.a), b1 = to_eigen(m.b1), b2 = to_eigen(m.b2), h = to_eigen(m.h);
  const Eigen::MatrixXd k1 = to_eigen(k1m), k2 = to_eigen(k2m);
  const Eigen::MatrixXd pt = to_eigen(ptilde);
  const Eigen::MatrixXd& ki = player == 1 ? k1 : k2;
  const Eigen::MatrixXd& ko = player == 1 ? k2 : k1;
  const Eigen::MatrixXd q = to_eigen(player == 1 ? m.q1 : m.q2);
  const Eigen::MatrixXd rown = to_eigen(player == 1 ? m.r11 : m.r22);
  const Eigen::MatrixXd rcross = to_eigen(player == 1 ? m.r12 : m.r21);
  const Eigen::Index n = a.rows();
  const Eigen::Index np = h.cols();
  const Eigen::Index nu = ki.rows();
  Eigen::Index nq = 0;
  for (const auto& blk : m.blocks) nq += static_cast<Eigen::Index>(blk.q_dim());

  const Eigen::MatrixXd acl = a + b1 * k1 + b2 * k2;
  Eigen::MatrixXd phi = q + ko.transpose() * rcross * ko;
  Eigen::MatrixXd tau_xi0 = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd tau_s0 = Eigen::MatrixXd::Zero(nq, np);
  Eigen::MatrixXd nu_q = Eigen::MatrixXd::Zero(nq, nq);
  Eigen::Index po = 0, qo = 0;
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    const auto& blk = m.blocks[j];
    const Eigen::Index pj = static_cast<Eigen::Index>(blk.p_dim());
    const Eigen::Index qj = static_cast<Eigen::Index>(blk.q_dim());
    const Eigen::MatrixXd aq = to_eigen(blk.aq_rows), g = to_eigen(blk.g);
    const Eigen::MatrixXd q0 = to_eigen(blk.q0), s0 = to_eigen(blk.s0), r0 = to_eigen(blk.r0);
    const Eigen::MatrixXd xi0 = q0 + g.transpose() * s0.transpose() + s0 * g + g.transpose() * r0 * g;
    const Eigen::MatrixXd s0c = s0.transpose() + r0 * g;
    phi += aq.transpose() * (mult.tau[j] * r0 + mult.nu[j] * Eigen::MatrixXd::Identity(qj, qj)) * aq;
    tau_xi0.block(po, po, pj, pj) = mult.tau[j] * xi0;
    tau_s0.block(qo, po, qj, pj) = mult.tau[j] * s0c;
    nu_q.block(qo, qo, qj, qj) = mult.nu[j] * Eigen::MatrixXd::Identity(qj, qj);
    po += pj;
    qo += qj;
  }

  const Eigen::Index dim = 2 * n + np + nu + nq;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::Index o2 = n, o3 = 2 * n, o4 = 2 * n + np, o5 = 2 * n + np + nu;
  l.block(0, 0, n, n) = phi - pt;
  l.block(0, o2, n, n) = acl.transpose() * pt;
  l.block(o2, 0, n, n) = pt * acl;
  l.block(o2, o2, n, n) = -pt;
  l.block(0, o3, n, np) = pt * h;
  l.block(o3, 0, np, n) = h.transpose() * pt;
  l.block(o3, o3, np, np) = -h.transpose() * pt * h + tau_xi0;
  l.block(0, o4, n, nu) = ki.transpose();
  l.block(o4, 0, nu, n) = ki;
  l.block(o4, o4, nu, nu) = -rown.inverse();
  l.block(o3, o5, np, nq) = tau_s0.transpose();
  l.block(o5, o3, nq, np) = tau_s0;
  l.block(o5, o5, nq, nq) = -nu_q;
  return l;
}

/// ν̲ Ξ0 + τ̲ 𝒮0ᵀ𝒮0, written out densely.
inline Eigen::MatrixXd multiplier_matrix(const catchup::game::GameModel& m,
                                         const catchup::synthesis::Multipliers& mult) {
  Eigen::Index np = 0;
  for (const auto& blk : m.blocks) np += static_cast<Eigen::Index>(blk.p_dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(np, np);
  Eigen::Index po = 0;
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    const auto& blk = m.blocks[j];
    const Eigen::Index pj = static_cast<Eigen::Index>(blk.p_dim());
    const Eigen::MatrixXd g = to_eigen(blk.g), q0 = to_eigen(blk.q0), s0 = to_eigen(blk.s0), r0 = to_eigen(blk.r0);
    const Eigen::MatrixXd xi0 = q0 + g.transpose() * s0.transpose() + s0 * g + g.transpose() * r0 * g;
    const Eigen::MatrixXd s0c = s0.transpose() + r0 * g;
    out.block(po, po, pj, pj) = mult.nu[j] * xi0 + mult.tau[j] * s0c.transpose() * s0c;
    po += pj;
  }
  return out;
}

struct Costs {
  double fiscal = 0.0;
  double monetary = 0.0;
  int steps = 0;
};

/// Accumulated stage costs of both players along x⁺ = 𝒜x + Hp until
/// ‖x‖ < stop_norm; `uncertainty(x)` supplies p.
inline Costs accumulate_costs(const catchup::game::GameModel& m, const Matrix& k1m, const Matrix& k2m,
                              Eigen::VectorXd x, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& uncertainty,
                              double stop_norm = 1e-10, int max_steps = 100000) {
  const Eigen::MatrixXd a = to_eigen(m.a), b1 = to_eigen(m.b1), b2 = to_eigen(m.b2), h = to_eigen(m.h);
  const Eigen::MatrixXd k1 = to_eigen(k1m), k2 = to_eigen(k2m);
  const Eigen::MatrixXd q1 = to_eigen(m.q1), q2 = to_eigen(m.q2);
  const Eigen::MatrixXd r11 = to_eigen(m.r11), r12 = to_eigen(m.r12), r21 = to_eigen(m.r21), r22 = to_eigen(m.r22);
  Costs c;
  while (x.norm() >= stop_norm && c.steps < max_steps) {
    const Eigen::VectorXd u1 = k1 * x;
    const Eigen::VectorXd u2 = k2 * x;
    c.fiscal += x.dot(q1 * x) + u1.dot(r11 * u1) + u2.dot(r12 * u2);
    c.monetary += x.dot(q2 * x) + u2.dot(r22 * u2) + u1.dot(r21 * u1);
    x = a * x + b1 * u1 + b2 * u2 + h * uncertainty(x);
    ++c.steps;
  }
  return c;
}

}  // namespace oracle
