#include "catchup/fimo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace catchup::fimo {

using linalg::Matrix;
using linalg::SymmetricMatrix;

void MacroParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("MacroParams: ") + name + " must be positive");
  };
  positive(alpha1, "alpha1");
  positive(alpha2, "alpha2");
  positive(beta1, "beta1");
  positive(beta2, "beta2");
  positive(gamma1, "gamma1");
  positive(gamma2, "gamma2");
  positive(rho1, "rho1");
  positive(rho2, "rho2");
  for (double d : delta)
    if (!std::isfinite(d)) throw std::invalid_argument("MacroParams: delta must be finite");
  if (!std::isfinite(pi_star) || !std::isfinite(i_star)) throw std::invalid_argument("MacroParams: targets must be finite");
  if (pi_star != i_star) throw std::invalid_argument("MacroParams: pi_star must equal i_star");
}

MacroState reference_x0() { return {-0.04, 0.175}; }

game::GameModel build_canonical(const MacroParams& p) {
  p.validate();
  game::GameModel m;
  m.a = Matrix{{0.0, p.alpha1}, {p.beta1, 1.0}};
  m.b1 = Matrix{{-p.alpha2}, {0.0}};
  m.b2 = Matrix{{-p.alpha1}, {p.beta2}};
  m.h = m.a;
  m.q1 = SymmetricMatrix(2);
  m.q1.set(0, 0, p.gamma1);
  m.q2 = SymmetricMatrix(2);
  m.q2.set(1, 1, p.rho1);
  m.r11 = SymmetricMatrix(1, p.gamma2);
  m.r22 = SymmetricMatrix(1, p.rho2);
  m.r12 = SymmetricMatrix(1);
  m.r21 = SymmetricMatrix(1);

  game::UncertaintyBlock b1;
  b1.q0 = SymmetricMatrix(1, -1.0);
  b1.s0 = Matrix{{1.0}};
  b1.r0 = SymmetricMatrix(1, 1.0);
  b1.aq_rows = Matrix{{p.delta[0], p.delta[1]}};
  b1.g = Matrix{{-1.0}};

  game::UncertaintyBlock b2;
  b2.q0 = SymmetricMatrix(1, 0.0);
  b2.s0 = Matrix{{1.0}};
  b2.r0 = SymmetricMatrix(1, 0.0);
  b2.aq_rows = Matrix{{p.delta[2], p.delta[3]}};
  b2.g = Matrix{{-1.0}};

  m.blocks = {b1, b2};
  m.validate();
  return m;
}

std::array<uncertainty::ConeSpec, 2> cones(const MacroParams& p) {
  return {uncertainty::symmetric_cone({p.delta[0], p.delta[1]}), uncertainty::one_sided_cone({p.delta[2], p.delta[3]})};
}

MacroState step_dynamics(const MacroParams& p, const MacroState& s, double g, double i_tilde, double p1, double p2) {
  MacroState n;
  n.z = p.alpha1 * s.pi_tilde - p.alpha1 * i_tilde - p.alpha2 * g + p.alpha1 * p2;
  n.pi_tilde = p.beta1 * s.z + s.pi_tilde + p.beta2 * i_tilde + p.beta1 * p1 + p2;
  return n;
}

Expectations expectations(const MacroParams& p, const MacroState& s, double p1, double p2) {
  return {s.z + p1, s.pi_tilde + p.pi_star + p2};
}

MacroState structural_step(const MacroParams& p, const MacroState& s, double g, double i, const Expectations& e) {
  (void)s;
  MacroState n;
  n.z = -p.alpha1 * (i - e.epi_next) - p.alpha2 * g;
  const double pi_next = p.beta1 * e.ez_next + e.epi_next + p.beta2 * (i - p.i_star);
  n.pi_tilde = pi_next - p.pi_star;
  return n;
}

}  // namespace catchup::fimo
