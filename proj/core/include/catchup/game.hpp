#pragma once

// The canonical uncertain two-player linear-quadratic game
//
//   x⁺ = A x + B1 u1 + B2 u2 + H p,   q = A_q x + G p,
//
// with one quadratic constraint set per uncertainty block j:
//
//   [p_j; q_j]ᵀ [[Q0j, S0j], [S0jᵀ, R0j]] [p_j; q_j] ≥ 0.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catchup/linalg.hpp"

namespace catchup::game {

using linalg::Matrix;
using linalg::SymmetricMatrix;
using linalg::Vector;

struct UncertaintyBlock {
  SymmetricMatrix q0;  // p_dim × p_dim
  Matrix s0;           // p_dim × q_dim
  SymmetricMatrix r0;  // q_dim × q_dim
  Matrix aq_rows;      // q_dim × state_dim
  Matrix g;            // q_dim × p_dim

  std::size_t p_dim() const { return q0.dim(); }
  std::size_t q_dim() const { return r0.dim(); }

  /// Throws std::invalid_argument on inconsistent dimensions.
  void validate(std::size_t state_dim) const;
};

struct GameModel {
  Matrix a;
  Matrix b1;
  Matrix b2;
  Matrix h;
  std::vector<UncertaintyBlock> blocks;
  SymmetricMatrix q1;
  SymmetricMatrix q2;
  SymmetricMatrix r11;
  SymmetricMatrix r22;
  SymmetricMatrix r12;  // player 1's weight on u2
  SymmetricMatrix r21;  // player 2's weight on u1

  std::size_t state_dim() const { return a.rows(); }
  std::size_t u1_dim() const { return b1.cols(); }
  std::size_t u2_dim() const { return b2.cols(); }
  std::size_t p_dim() const;
  std::size_t q_dim() const;

  // Player-indexed views, player ∈ {1, 2}.
  const Matrix& b(int player) const;
  const SymmetricMatrix& q(int player) const;
  const SymmetricMatrix& r_own(int player) const;
  const SymmetricMatrix& r_cross(int player) const;

  /// Stacked A_q, block-diagonal G, Q0, S0, R0.
  Matrix aq() const;
  Matrix g() const;
  SymmetricMatrix q0() const;
  Matrix s0() const;
  SymmetricMatrix r0() const;

  /// Dimensions, symmetry and definiteness (Q_i ≽ 0, R_ii ≻ 0, R_ij ≽ 0).
  /// Throws std::invalid_argument.
  void validate() const;
};

/// Rejects player indices other than 1 and 2.
int check_player(int player);

SymmetricMatrix xi0(const UncertaintyBlock& block);
/// Block-diagonal Ξ0 over all blocks.
SymmetricMatrix xi0(const GameModel& m);

/// 𝒮0 = S0ᵀ + R0 G (q_dim × p_dim).
Matrix s0_cal(const UncertaintyBlock& block);
Matrix s0_cal(const GameModel& m);

struct Assumption1Report {
  bool passed = true;
  std::optional<std::size_t> offending_block;
  /// "R0" or "Xi0" when failed.
  std::string failed_condition;
  /// Most-negative eigenvalue of R0, or largest eigenvalue of Ξ0.
  double eigenvalue = 0.0;
  std::string message;
};

Assumption1Report check_assumption1(const GameModel& m);

struct Assumption2Report {
  bool stabilizable = true;
  bool detectable = true;
  std::vector<std::complex<double>> unstable_eigenvalues;
  std::string message;
  bool passed() const { return stabilizable && detectable; }
};

Assumption2Report check_assumption2(const GameModel& m);

/// [p;q]ᵀ Ω [p;q] ≥ −1e-12.
bool omega_membership(const UncertaintyBlock& block, std::span<const double> p,
                      std::span<const double> q);
double omega_form(const UncertaintyBlock& block, std::span<const double> p,
                  std::span<const double> q);

}  // namespace catchup::game
