#include <gtest/gtest.h>

#include <random>

#include "catchup/fimo.hpp"
#include "catchup/game.hpp"

using namespace catchup;
using namespace catchup::fimo;

TEST(Canonical, MatricesFromParameters) {
  const auto m = build_canonical({});
  EXPECT_EQ(m.a, (linalg::Matrix{{0.0, 0.16}, {0.699, 1.0}}));
  EXPECT_EQ(m.b1, (linalg::Matrix{{-0.19}, {0.0}}));
  EXPECT_EQ(m.b2, (linalg::Matrix{{-0.16}, {0.433}}));
  EXPECT_EQ(m.h, m.a);
  EXPECT_EQ(m.q1(0, 0), 0.2);
  EXPECT_EQ(m.q1(1, 1), 0.0);
  EXPECT_EQ(m.q2(1, 1), 0.2);
  EXPECT_EQ(m.q2(0, 0), 0.0);
  EXPECT_EQ(m.r11(0, 0), 0.075);
  EXPECT_EQ(m.r22(0, 0), 0.01);
  EXPECT_EQ(m.r12(0, 0), 0.0);
  EXPECT_EQ(m.r21(0, 0), 0.0);
  EXPECT_EQ(m.aq(), (linalg::Matrix{{0.0, 0.1}, {0.15, 0.15}}));
  EXPECT_TRUE(game::check_assumption1(m).passed);
  EXPECT_TRUE(game::check_assumption2(m).passed());
}

TEST(Canonical, ReferenceInitialState) {
  EXPECT_EQ(reference_x0().z, -0.04);
  EXPECT_EQ(reference_x0().pi_tilde, 0.175);
}

TEST(Dynamics, HandExamples) {
  const MacroParams p;
  const auto n = step_dynamics(p, {0.0, 0.175}, 0.0, 0.0, 0.0, 0.0);
  EXPECT_NEAR(n.z, 0.028, 1e-15);
  EXPECT_NEAR(n.pi_tilde, 0.175, 1e-15);
  const auto g = step_dynamics(p, {0.0, 0.0}, 0.01, 0.0, 0.0, 0.0);
  EXPECT_NEAR(g.z, -0.0019, 1e-15);
  EXPECT_EQ(g.pi_tilde, 0.0);
  const auto i = step_dynamics(p, {0.0, 0.0}, 0.0, 0.01, 0.0, 0.0);
  EXPECT_NEAR(i.z, -0.0016, 1e-15);
  EXPECT_NEAR(i.pi_tilde, 0.00433, 1e-15);
}

TEST(Dynamics, MatrixFormAgreesWithScalarEquations) {
  const MacroParams p;
  const auto m = build_canonical(p);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int k = 0; k < 1000; ++k) {
    const double x[2] = {u(rng), u(rng)};
    const double g = u(rng), it = u(rng), p1 = u(rng), p2 = u(rng);
    const auto n = step_dynamics(p, {x[0], x[1]}, g, it, p1, p2);
    for (std::size_t r = 0; r < 2; ++r) {
      const double v = m.a(r, 0) * x[0] + m.a(r, 1) * x[1] + m.b1(r, 0) * g + m.b2(r, 0) * it + m.h(r, 0) * p1 +
                       m.h(r, 1) * p2;
      EXPECT_NEAR(r == 0 ? n.z : n.pi_tilde, v, 1e-14);
    }
  }
}

TEST(Dynamics, StructuralEquationsAgreeInDeviationForm) {
  const MacroParams p;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int k = 0; k < 1000; ++k) {
    const MacroState s{u(rng), u(rng)};
    const double g = u(rng), it = u(rng), p1 = u(rng), p2 = u(rng);
    const auto e = expectations(p, s, p1, p2);
    EXPECT_NEAR(e.ez_next, s.z + p1, 1e-15);
    EXPECT_NEAR(e.epi_next, s.pi_tilde + p.pi_star + p2, 1e-15);
    const auto a = structural_step(p, s, g, it + p.i_star, e);
    const auto b = step_dynamics(p, s, g, it, p1, p2);
    EXPECT_NEAR(a.z, b.z, 1e-14);
    EXPECT_NEAR(a.pi_tilde, b.pi_tilde, 1e-14);
  }
}

TEST(Params, Validation) {
  MacroParams p;
  EXPECT_NO_THROW(p.validate());
  p.alpha1 = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = MacroParams{};
  p.rho2 = -1.0;
  EXPECT_THROW(build_canonical(p), std::invalid_argument);
  p = MacroParams{};
  p.i_star = 0.04;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Cones, FollowDeltaRows) {
  const auto cs = cones({});
  EXPECT_EQ(cs[0].kind, uncertainty::ConeKind::kSymmetric);
  EXPECT_EQ(cs[1].kind, uncertainty::ConeKind::kOneSided);
  const double x[2] = {1.0, 2.0};
  EXPECT_NEAR(cs[0].output(x), 0.2, 1e-15);
  EXPECT_NEAR(cs[1].output(x), 0.45, 1e-15);
}
