#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catchup/fimo.hpp"
#include "catchup/game.hpp"
#include "catchup/linalg.hpp"

using namespace catchup;
using game::GameModel;
using game::UncertaintyBlock;
using linalg::Matrix;
using linalg::SymmetricMatrix;

namespace {

SymmetricMatrix scalar(double v) { return SymmetricMatrix(1, v); }

UncertaintyBlock scalar_block(double q0, double s0, double r0, double g, Matrix aq = Matrix{{1.0, 0.0}}) {
  UncertaintyBlock b;
  b.q0 = scalar(q0);
  b.s0 = Matrix{{s0}};
  b.r0 = scalar(r0);
  b.aq_rows = std::move(aq);
  b.g = Matrix{{g}};
  return b;
}

GameModel small_model() {
  GameModel m;
  m.a = Matrix{{0.5, 0.0}, {0.0, 0.5}};
  m.b1 = Matrix{{1.0}, {0.0}};
  m.b2 = Matrix{{0.0}, {1.0}};
  m.h = Matrix{{1.0}, {0.0}};
  m.blocks = {scalar_block(-1.0, 0.0, 0.0, 0.0)};
  m.q1 = SymmetricMatrix::identity(2);
  m.q2 = SymmetricMatrix::identity(2);
  m.r11 = scalar(1.0);
  m.r22 = scalar(1.0);
  m.r12 = scalar(0.0);
  m.r21 = scalar(0.0);
  return m;
}

}  // namespace

TEST(Xi0, FiscalMonetaryBlocksAreMinusTwo) {
  const auto m = fimo::build_canonical({});
  EXPECT_EQ(game::xi0(m.blocks[0])(0, 0), -2.0);
  EXPECT_EQ(game::xi0(m.blocks[1])(0, 0), -2.0);
  const auto full = game::xi0(m);
  EXPECT_EQ(full(0, 0), -2.0);
  EXPECT_EQ(full(1, 1), -2.0);
  EXPECT_EQ(full(0, 1), 0.0);
}

TEST(Xi0, ZeroCouplingLeavesQ0) {
  auto b = scalar_block(-0.7, 0.0, 3.0, 0.0);
  EXPECT_EQ(game::xi0(b)(0, 0), -0.7);
}

TEST(Xi0, BlockDiagonalMatchesStackedFormula) {
  const auto m = fimo::build_canonical({});
  const Matrix g = m.g();
  const Matrix s0 = m.s0();
  const Matrix direct = m.q0().to_matrix() + g.transpose() * s0.transpose() + s0 * g +
                        g.transpose() * m.r0().to_matrix() * g;
  EXPECT_LE((game::xi0(m).to_matrix() - direct).max_abs(), 1e-15);
}

TEST(Assumption1, Examples) {
  EXPECT_TRUE(game::check_assumption1(fimo::build_canonical({})).passed);

  auto m = small_model();
  m.blocks = {scalar_block(1.0, 0.0, 0.0, 0.0)};
  const auto r = game::check_assumption1(m);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.failed_condition, "Xi0");
  ASSERT_TRUE(r.offending_block.has_value());
  EXPECT_EQ(*r.offending_block, 0u);
  EXPECT_DOUBLE_EQ(r.eigenvalue, 1.0);

  m.blocks = {scalar_block(-1.0, 0.0, 0.0, 0.0), scalar_block(-1.0, 0.0, -1.0, 0.0)};
  const auto r2 = game::check_assumption1(m);
  EXPECT_FALSE(r2.passed);
  EXPECT_EQ(r2.failed_condition, "R0");
  EXPECT_EQ(*r2.offending_block, 1u);
}

TEST(Assumption2, Examples) {
  EXPECT_TRUE(game::check_assumption2(fimo::build_canonical({})).passed());

  auto m = small_model();
  m.a = Matrix{{2.0, 0.0}, {0.0, 0.5}};
  m.b1 = Matrix{{0.0}, {0.0}};
  m.b2 = Matrix{{0.0}, {0.0}};
  const auto r = game::check_assumption2(m);
  EXPECT_FALSE(r.stabilizable);
  EXPECT_FALSE(r.passed());

  auto z = small_model();
  z.a = Matrix(2, 2);
  z.q1 = SymmetricMatrix(2);
  z.q2 = SymmetricMatrix(2);
  EXPECT_TRUE(game::check_assumption2(z).passed());
}

TEST(Assumption2, UndetectableUnstableMode) {
  auto m = small_model();
  m.a = Matrix{{1.5, 0.0}, {0.0, 0.5}};
  m.q1 = SymmetricMatrix(2);
  m.q2 = SymmetricMatrix(2);
  m.q2.set(1, 1, 1.0);
  const auto r = game::check_assumption2(m);
  EXPECT_TRUE(r.stabilizable);
  EXPECT_FALSE(r.detectable);
}

TEST(Assumption2, MacroPbhRankByHand) {
  // [A − λI, B1, B2] at the unstable root keeps full row rank because the
  // B columns [−0.19; 0] and [−0.16; 0.433] are independent.
  const double lam = 1.101531379065132;
  const Matrix pbh{{-lam, 0.16, -0.19, -0.16}, {0.699, 1.0 - lam, 0.0, 0.433}};
  EXPECT_EQ(linalg::numerical_rank(pbh), 2u);
}

TEST(Omega, ZeroPIsAlwaysInside) {
  const auto m = fimo::build_canonical({});
  const double p[] = {0.0};
  for (double q : {-3.0, 0.0, 0.2, 5.0}) {
    const double qq[] = {q};
    EXPECT_TRUE(game::omega_membership(m.blocks[0], p, qq));
    EXPECT_TRUE(game::omega_membership(m.blocks[1], p, qq));
  }
}

TEST(Omega, MacroBlocksReduceToCones) {
  const auto m = fimo::build_canonical({});
  auto member = [&](std::size_t blk, double y, double p) {
    const double pv[] = {p};
    const double qv[] = {y - p};
    return game::omega_membership(m.blocks[blk], pv, qv);
  };
  EXPECT_TRUE(member(0, 1.0, 0.7));
  EXPECT_FALSE(member(0, 1.0, 0.8));
  EXPECT_TRUE(member(1, 1.0, 0.5));
  EXPECT_FALSE(member(1, 1.0, -0.1));
}

TEST(Omega, FormReducesAlgebraically) {
  const auto m = fimo::build_canonical({});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double y = u(rng), p = u(rng);
    const double pv[] = {p};
    const double qv[] = {y - p};
    EXPECT_NEAR(game::omega_form(m.blocks[0], pv, qv), y * y - 2.0 * p * p, 1e-14);
    EXPECT_NEAR(game::omega_form(m.blocks[1], pv, qv), 2.0 * p * (y - p), 1e-14);
  }
}

TEST(GameModel, ValidateCatchesBadData) {
  auto m = small_model();
  EXPECT_NO_THROW(m.validate());
  m.r11 = scalar(0.0);
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = small_model();
  m.q1.set(0, 0, -1.0);
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = small_model();
  m.b1 = Matrix(3, 1);
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = small_model();
  m.blocks.clear();
  EXPECT_THROW(m.validate(), std::invalid_argument);
  EXPECT_THROW(game::check_player(3), std::invalid_argument);
}
