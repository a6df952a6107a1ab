#pragma once

// Nash cost-guaranteeing state feedback for the uncertain two-player game.
//
// Each player i holds a certificate P̃_i ≻ 0 and S-procedure multipliers
// (τ_j, ν_j), one pair per uncertainty block. The gains solve the coupled
// linear system built from both P̃'s; every P̃_i must satisfy its player's
// matrix inequality at those gains. The guaranteed cost is x0ᵀ P_i x0 with
// P_i recovered from P̃_i through
//
//   P̃_i = (P_i⁻¹ + H Ξ_i⁻¹ Hᵀ)⁻¹,   Ξ_i = blockdiag_j τ_j (Ξ0_j + (τ_j/ν_j) 𝒮0_jᵀ 𝒮0_j).

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catchup/game.hpp"
#include "catchup/sdp.hpp"

namespace catchup::synthesis {

using game::GameModel;
using linalg::Matrix;
using linalg::SymmetricMatrix;
using linalg::Vector;

/// One player's multipliers, one entry per uncertainty block.
struct Multipliers {
  Vector tau;
  Vector nu;
};

class DegenerateGainSystemError : public linalg::NumericalError {
 public:
  DegenerateGainSystemError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class CertificateInconsistencyError : public linalg::NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// [[R11+B1ᵀP̃1B1, B1ᵀP̃1B2], [B2ᵀP̃2B1, R22+B2ᵀP̃2B2]] [K1; K2] = −[B1ᵀP̃1; B2ᵀP̃2] A.
std::pair<Matrix, Matrix> solve_gain_equation(const GameModel& m, const SymmetricMatrix& ptilde1,
                                              const SymmetricMatrix& ptilde2);

/// ‖lhs − rhs‖_F / (1 + ‖rhs‖_F) for the block system above.
double gain_equation_residual(const GameModel& m, const SymmetricMatrix& ptilde1,
                              const SymmetricMatrix& ptilde2, const Matrix& k1, const Matrix& k2);

Matrix closed_loop(const GameModel& m, const Matrix& k1, const Matrix& k2);

/// ν̲ Ξ0 + τ̲ 𝒮0ᵀ𝒮0 ≺ 0 with the given margin.
bool check_multiplier_inequality(const GameModel& m, const Multipliers& mult, double margin = 1e-10);

/// Ξ(τ, τ/ν), block-diagonal p_dim × p_dim.
SymmetricMatrix xi(const GameModel& m, const Multipliers& mult);

/// Variable layout of a player LMI: the packed upper triangle of P̃ first,
/// then τ_1..τ_s, then ν_1..ν_s (the last two only when not fixed).
struct PlayerLmiLayout {
  std::size_t state_dim = 0;
  std::size_t blocks = 0;
  bool multipliers_fixed = false;

  std::size_t ptilde_count() const { return state_dim * (state_dim + 1) / 2; }
  std::size_t tau_id(std::size_t j) const { return ptilde_count() + j; }
  std::size_t nu_id(std::size_t j) const { return ptilde_count() + blocks + j; }
  std::size_t num_variables() const { return ptilde_count() + (multipliers_fixed ? 0 : 2 * blocks); }
  std::size_t ptilde_id(std::size_t r, std::size_t c) const;
};

struct PlayerLmi {
  sdp::LmiProblem problem;
  PlayerLmiLayout layout;
};

/// The player's 5-block inequality (first constraint) and the multiplier
/// inequality (second constraint). With `fixed` set, only P̃ is free.
PlayerLmi build_player_lmi(const GameModel& m, const Matrix& k1, const Matrix& k2, int player,
                           const std::optional<Multipliers>& fixed = std::nullopt);

/// Packs P̃ (and multipliers unless fixed) into a variable vector.
Vector pack_variables(const PlayerLmiLayout& layout, const SymmetricMatrix& ptilde, const Multipliers& mult);
SymmetricMatrix unpack_ptilde(const PlayerLmiLayout& layout, std::span<const double> x);
Multipliers unpack_multipliers(const PlayerLmiLayout& layout, std::span<const double> x);

/// P = (P̃⁻¹ − H Ξ⁻¹ Hᵀ)⁻¹. Throws CertificateInconsistencyError when Ξ is
/// not negative definite or the implied P⁻¹ is not positive definite.
SymmetricMatrix recover_p(const GameModel& m, const SymmetricMatrix& ptilde, const Multipliers& mult);

/// Forward map (P⁻¹ + H Ξ⁻¹ Hᵀ)⁻¹.
SymmetricMatrix ptilde_from_p(const GameModel& m, const SymmetricMatrix& p, const Multipliers& mult);

struct IterationRecord {
  int iteration = 0;
  double gain_change = 0.0;
  double ptilde_change = 0.0;
  std::array<double, 2> trace{};
  bool damped = false;
};

struct GuaranteedSolution {
  std::array<Matrix, 2> gains;
  std::array<SymmetricMatrix, 2> ptilde;
  std::array<SymmetricMatrix, 2> p;
  std::array<Multipliers, 2> multipliers;
  /// Independent eigenvalue re-check of each player's inequalities.
  std::array<double, 2> margins{};
  double gain_residual = 0.0;
  double closed_loop_radius = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> history;

  const Matrix& k(int player) const { return gains[game::check_player(player) - 1]; }
  double cost(int player, std::span<const double> x0) const;
};

double guaranteed_cost(const GuaranteedSolution& sol, int player, std::span<const double> x0);

struct SynthesisOptions {
  /// Margin required of the reported certificate.
  double strictness = 1e-8;
  /// Margin used inside the fixed-point loop; larger than `strictness` so the
  /// final gain update cannot push the certificate below it.
  double loop_strictness = 1e-7;
  double tolerance = 1e-7;
  int max_iterations = 200;
  /// Golden-section refinement of the multipliers after the first fixed point.
  bool refine_multipliers = true;
  int refinement_rounds = 2;
  int refinement_sweeps = 2;
  /// Final fixed-point pass at twice `strictness` with the multipliers held.
  bool polish = true;
  sdp::SolverOptions solver{};
  bool check_assumptions = true;
};

class SynthesisError : public linalg::NumericalError {
 public:
  SynthesisError(const std::string& what, std::vector<IterationRecord> history)
      : NumericalError(what), history_(std::move(history)) {}
  const std::vector<IterationRecord>& history() const { return history_; }

 private:
  std::vector<IterationRecord> history_;
};

class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coupled value iteration of the uncertainty-free game (H ignored).
std::array<SymmetricMatrix, 2> nominal_value_iteration(const GameModel& m, int max_iterations = 10000,
                                                       double tolerance = 1e-13);

/// Margin of the player inequalities at given gains, P̃ and multipliers.
double certificate_margin(const GameModel& m, const Matrix& k1, const Matrix& k2, int player,
                          const SymmetricMatrix& ptilde, const Multipliers& mult);

GuaranteedSolution synthesize(const GameModel& m, std::span<const double> x0, const SynthesisOptions& options = {});

}  // namespace catchup::synthesis
