#pragma once

// Fiscal–monetary interaction model.
//
// State x = [z, π̃]: relative deviation of nominal GDP from its planned path
// and inflation deviation from target. Controls: u1 = g (budget-balance
// deviation, fiscal player), u2 = ĩ (interest-rate deviation, central bank).
// All quantities are fractions (0.04 means 4%).

#include <array>

#include "catchup/game.hpp"
#include "catchup/uncertainty.hpp"

namespace catchup::fimo {

struct MacroParams {
  double alpha1 = 0.16;
  double alpha2 = 0.19;
  double beta1 = 0.699;
  double beta2 = 0.433;
  double gamma1 = 0.2;
  double gamma2 = 0.075;
  double rho1 = 0.2;
  double rho2 = 0.01;
  std::array<double, 4> delta{0.0, 0.1, 0.15, 0.15};
  double pi_star = 0.03;
  double i_star = 0.03;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

struct MacroState {
  double z = 0.0;
  double pi_tilde = 0.0;
};

/// Initial state used in the reference study: z = −4%, π̃ = 17.5%.
MacroState reference_x0();

game::GameModel build_canonical(const MacroParams& p);

/// Symmetric cone on y1 = δ1 z + δ2 π̃ and one-sided cone on y2 = δ3 z + δ4 π̃.
std::array<uncertainty::ConeSpec, 2> cones(const MacroParams& p);

MacroState step_dynamics(const MacroParams& p, const MacroState& s, double g, double i_tilde, double p1, double p2);

struct Expectations {
  double ez_next = 0.0;
  double epi_next = 0.0;
};

/// E[z⁺] = z + p1, E[π⁺] = π + p2 (levels, not deviations).
Expectations expectations(const MacroParams& p, const MacroState& s, double p1, double p2);

/// Raw structural equations with expectations as inputs, in levels:
///   z⁺ = −α1 (i − E[π⁺]) − α2 g,   π⁺ = β1 E[z⁺] + E[π⁺] + β2 (i − i*).
/// Returns the next state in deviation form.
MacroState structural_step(const MacroParams& p, const MacroState& s, double g, double i, const Expectations& e);

}  // namespace catchup::fimo
