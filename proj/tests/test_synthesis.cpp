#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catchup/fimo.hpp"
#include "catchup/synthesis.hpp"
#include "oracles.hpp"

using namespace catchup;
using game::GameModel;
using linalg::Matrix;
using linalg::SymmetricMatrix;
using synthesis::Multipliers;

namespace {

const double kX0[2] = {-0.04, 0.175};

const synthesis::GuaranteedSolution& paper_solution() {
  static const auto sol = synthesis::synthesize(fimo::build_canonical({}), kX0);
  return sol;
}

GameModel scalar_game() {
  GameModel m;
  m.a = Matrix{{1.0}};
  m.b1 = Matrix{{1.0}};
  m.b2 = Matrix{{1.0}};
  m.h = Matrix{{1.0}};
  game::UncertaintyBlock b;
  b.q0 = SymmetricMatrix(1, -1.0);
  b.s0 = Matrix{{0.0}};
  b.r0 = SymmetricMatrix(1, 0.0);
  b.aq_rows = Matrix{{0.0}};
  b.g = Matrix{{0.0}};
  m.blocks = {b};
  m.q1 = SymmetricMatrix(1, 1.0);
  m.q2 = SymmetricMatrix(1, 1.0);
  m.r11 = SymmetricMatrix(1, 1.0);
  m.r22 = SymmetricMatrix(1, 1.0);
  m.r12 = SymmetricMatrix(1, 0.0);
  m.r21 = SymmetricMatrix(1, 0.0);
  return m;
}

Multipliers mult(std::initializer_list<double> tau, std::initializer_list<double> nu) {
  return {linalg::Vector(tau), linalg::Vector(nu)};
}

}  // namespace

TEST(GainEquation, ZeroDynamicsGiveZeroGains) {
  auto m = fimo::build_canonical({});
  m.a = Matrix(2, 2);
  const auto [k1, k2] = synthesis::solve_gain_equation(m, SymmetricMatrix::identity(2), SymmetricMatrix::identity(2));
  EXPECT_EQ(k1.max_abs(), 0.0);
  EXPECT_EQ(k2.max_abs(), 0.0);
}

TEST(GainEquation, ScalarSymmetricCase) {
  // [[2, 1], [1, 2]] [k1; k2] = −[1; 1].
  const auto m = scalar_game();
  const auto [k1, k2] = synthesis::solve_gain_equation(m, SymmetricMatrix(1, 1.0), SymmetricMatrix(1, 1.0));
  EXPECT_NEAR(k1(0, 0), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(k2(0, 0), -1.0 / 3.0, 1e-15);
  EXPECT_LE(synthesis::gain_equation_residual(m, SymmetricMatrix(1, 1.0), SymmetricMatrix(1, 1.0), k1, k2), 1e-15);
}

TEST(GainEquation, ResidualSmallOnRandomCertificates) {
  const auto m = fimo::build_canonical({});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<SymmetricMatrix, 2> p;
    for (auto& pi : p) {
      const Matrix r{{u(rng), u(rng)}, {u(rng), u(rng)}};
      pi = SymmetricMatrix::symmetrize(r.transpose() * r + 0.1 * Matrix::identity(2));
    }
    const auto [k1, k2] = synthesis::solve_gain_equation(m, p[0], p[1]);
    EXPECT_LE(synthesis::gain_equation_residual(m, p[0], p[1], k1, k2), 1e-12);
  }
}

TEST(MultiplierInequality, MacroBlocks) {
  const auto m = fimo::build_canonical({});
  // Block 2 reduces to −2ν + τ < 0; block 1 has 𝒮0 = 0.
  EXPECT_TRUE(synthesis::check_multiplier_inequality(m, mult({1.0, 1.0}, {1.0, 1.0})));
  EXPECT_FALSE(synthesis::check_multiplier_inequality(m, mult({1.0, 3.0}, {1.0, 1.0})));
  for (double tau1 : {1e-3, 1.0, 1e3}) {
    EXPECT_TRUE(synthesis::check_multiplier_inequality(m, mult({tau1, 0.5}, {1.0, 1.0})));
  }
  const Eigen::MatrixXd dense = oracle::multiplier_matrix(m, mult({1.0, 1.0}, {1.0, 1.0}));
  EXPECT_NEAR(dense(0, 0), -2.0, 1e-15);
  EXPECT_NEAR(dense(1, 1), -1.0, 1e-15);
}

TEST(PlayerLmi, TrivialUncoupledCaseIsFeasible) {
  auto m = fimo::build_canonical({});
  m.a = Matrix{{0.5, 0.0}, {0.0, 0.5}};
  m.h = Matrix(2, 2);
  const Matrix k1(1, 2), k2(1, 2);
  const auto lmi = synthesis::build_player_lmi(m, k1, k2, 1);
  const auto s = sdp::solve_feasibility(lmi.problem, 1e-8);
  ASSERT_EQ(s.status, sdp::LmiStatus::kFeasible);
  const auto pt = synthesis::unpack_ptilde(lmi.layout, s.values);
  const auto mu = synthesis::unpack_multipliers(lmi.layout, s.values);
  EXPECT_LE(oracle::max_eig(oracle::player_lmi(m, k1, k2, 1, pt, mu)), -1e-8);
}

TEST(PlayerLmi, UnstableClosedLoopIsInfeasible) {
  auto m = fimo::build_canonical({});
  m.a = Matrix{{2.0, 0.0}, {0.0, 0.5}};
  const Matrix k1(1, 2), k2(1, 2);
  for (int player : {1, 2}) {
    const auto lmi = synthesis::build_player_lmi(m, k1, k2, player);
    EXPECT_NE(sdp::solve_feasibility(lmi.problem, 1e-8).status, sdp::LmiStatus::kFeasible);
  }
}

TEST(PlayerLmi, AssemblyMatchesDenseOracle) {
  const auto m = fimo::build_canonical({});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix k1{{u(rng), u(rng)}}, k2{{u(rng), u(rng)}};
    const Matrix r{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const auto pt = SymmetricMatrix::symmetrize(r.transpose() * r + 0.1 * Matrix::identity(2));
    const Multipliers mu = mult({pos(rng), pos(rng)}, {pos(rng), pos(rng)});
    for (int player : {1, 2}) {
      const auto lmi = synthesis::build_player_lmi(m, k1, k2, player, mu);
      const auto x = synthesis::pack_variables(lmi.layout, pt, mu);
      const Eigen::MatrixXd ours = oracle::to_eigen(lmi.problem.constraints[0].evaluate(x));
      const Eigen::MatrixXd ref = oracle::player_lmi(m, k1, k2, player, pt, mu);
      ASSERT_EQ(ours.rows(), ref.rows());
      EXPECT_LE((ours - ref).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial << " player " << player;
    }
  }
}

TEST(RecoverP, ZeroCouplingReturnsPtilde) {
  auto m = fimo::build_canonical({});
  m.h = Matrix(2, 2);
  const double d[] = {0.3, 0.7};
  const auto pt = SymmetricMatrix::diagonal(d);
  const auto p = synthesis::recover_p(m, pt, mult({1.0, 1.0}, {1.0, 1.0}));
  EXPECT_LE((p - pt).to_matrix().max_abs(), 1e-15);
}

TEST(RecoverP, ScalarExample) {
  // Ξ = −2, so P⁻¹ = 1 + 1/2.
  const auto m = scalar_game();
  const auto p = synthesis::recover_p(m, SymmetricMatrix(1, 1.0), mult({2.0}, {1.0}));
  EXPECT_NEAR(p(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(RecoverP, InvertsForwardMap) {
  const auto m = fimo::build_canonical({});
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto mu = mult({0.7, 0.4}, {1.0, 1.0});
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix r{{u(rng), u(rng)}, {u(rng), u(rng)}};
    // Small enough that P⁻¹ + HΞ⁻¹Hᵀ stays positive definite.
    const auto p = SymmetricMatrix::symmetrize(0.03 * (r.transpose() * r) + 0.02 * Matrix::identity(2));
    const auto pt = synthesis::ptilde_from_p(m, p, mu);
    EXPECT_LE((synthesis::recover_p(m, pt, mu) - p).to_matrix().max_abs(), 1e-9 * (1.0 + p.to_matrix().max_abs()));
  }
}

TEST(RecoverP, RejectsInconsistentCertificates) {
  const auto m = fimo::build_canonical({});
  EXPECT_THROW(synthesis::recover_p(m, SymmetricMatrix::identity(2), mult({1.0, 3.0}, {1.0, 1.0})),
               synthesis::CertificateInconsistencyError);
  const double d[] = {1.0, -1.0};
  EXPECT_THROW(synthesis::recover_p(m, SymmetricMatrix::diagonal(d), mult({1.0, 1.0}, {1.0, 1.0})),
               synthesis::CertificateInconsistencyError);
}

TEST(Synthesize, MacroCertificateHoldsUnderDenseRecheck) {
  const auto m = fimo::build_canonical({});
  const auto& s = paper_solution();
  for (int player : {1, 2}) {
    const auto& mu = s.multipliers[player - 1];
    const Eigen::MatrixXd l = oracle::player_lmi(m, s.gains[0], s.gains[1], player, s.ptilde[player - 1], mu);
    EXPECT_LE(oracle::max_eig(l), -1e-8);
    EXPECT_LE(oracle::max_eig(oracle::multiplier_matrix(m, mu)), -1e-8);
    for (std::size_t j = 0; j < mu.tau.size(); ++j) {
      EXPECT_GT(mu.tau[j], 0.0);
      EXPECT_GT(mu.nu[j], 0.0);
    }
    EXPECT_GE(s.margins[player - 1], 1e-8);
    EXPECT_LT(oracle::max_eig(-oracle::to_eigen(s.ptilde[player - 1])), 0.0);
    EXPECT_LT(oracle::max_eig(-oracle::to_eigen(s.p[player - 1])), 0.0);
  }
  EXPECT_LE(s.gain_residual, 1e-8);
  EXPECT_LE(synthesis::gain_equation_residual(m, s.ptilde[0], s.ptilde[1], s.gains[0], s.gains[1]), 1e-8);
  const Matrix acl = synthesis::closed_loop(m, s.gains[0], s.gains[1]);
  const auto roots = oracle::eig2(acl(0, 0), acl(0, 1), acl(1, 0), acl(1, 1));
  const double rho = std::max(std::abs(roots[0]), std::abs(roots[1]));
  EXPECT_LT(rho, 1.0);
  EXPECT_NEAR(s.closed_loop_radius, rho, 1e-12);
  EXPECT_GT(s.cost(1, kX0), 0.0);
  EXPECT_GT(s.cost(2, kX0), 0.0);
}

TEST(Synthesize, PtildeDominatesP) {
  // P̃ = (P⁻¹ + HΞ⁻¹Hᵀ)⁻¹ with Ξ ≺ 0 means P̃ ≽ P.
  const auto& s = paper_solution();
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXd diff = oracle::to_eigen(s.ptilde[i]) - oracle::to_eigen(s.p[i]);
    EXPECT_GE(-oracle::max_eig(-diff), -1e-12);
  }
}

TEST(Synthesize, ZeroInitialStateGivesZeroCost) {
  const double zero[2] = {0.0, 0.0};
  const auto s = synthesis::synthesize(fimo::build_canonical({}), zero);
  EXPECT_EQ(s.cost(1, zero), 0.0);
  EXPECT_EQ(s.cost(2, zero), 0.0);
  EXPECT_LT(s.closed_loop_radius, 1.0);
}

TEST(Synthesize, CostsScaleQuadraticallyWithX0) {
  const double x2[2] = {2.0 * kX0[0], 2.0 * kX0[1]};
  const auto s2 = synthesis::synthesize(fimo::build_canonical({}), x2);
  const auto& s1 = paper_solution();
  for (int player : {1, 2}) {
    EXPECT_NEAR(s2.cost(player, x2), 4.0 * s1.cost(player, kX0), 1e-6 * s2.cost(player, x2));
  }
}

TEST(Synthesize, RejectsFailedAssumptions) {
  auto m = fimo::build_canonical({});
  m.blocks[0].q0 = SymmetricMatrix(1, 5.0);
  EXPECT_THROW(synthesis::synthesize(m, kX0), synthesis::AssumptionError);
  const double bad[3] = {0.0, 0.0, 0.0};
  EXPECT_THROW(synthesis::synthesize(fimo::build_canonical({}), bad), std::invalid_argument);
}

TEST(Synthesize, DegenerateGameMatchesLqrOracle) {
  auto m = fimo::build_canonical({});
  m.h = Matrix(2, 2);
  m.b2 = Matrix(2, 1);
  m.q2 = SymmetricMatrix(2);
  synthesis::SynthesisOptions opt;
  opt.check_assumptions = false;
  const auto s = synthesis::synthesize(m, kX0, opt);
  const Eigen::MatrixXd k = oracle::dlqr_gain(oracle::to_eigen(m.a), oracle::to_eigen(m.b1), oracle::to_eigen(m.q1),
                                              oracle::to_eigen(m.r11));
  EXPECT_NEAR(s.gains[0](0, 0), k(0, 0), 1e-6);
  EXPECT_NEAR(s.gains[0](0, 1), k(0, 1), 1e-6);
}

TEST(Synthesize, NominalValueIterationSolvesCoupledRiccati) {
  const auto m = fimo::build_canonical({});
  const auto p = synthesis::nominal_value_iteration(m);
  const auto [k1, k2] = synthesis::solve_gain_equation(m, p[0], p[1]);
  const Eigen::MatrixXd acl = oracle::to_eigen(synthesis::closed_loop(m, k1, k2));
  const Eigen::MatrixXd e1 = oracle::to_eigen(k1), e2 = oracle::to_eigen(k2);
  const Eigen::MatrixXd p1 = oracle::to_eigen(p[0]), p2 = oracle::to_eigen(p[1]);
  const Eigen::MatrixXd r1 = oracle::to_eigen(m.q1) + e1.transpose() * oracle::to_eigen(m.r11) * e1 +
                             acl.transpose() * p1 * acl - p1;
  const Eigen::MatrixXd r2 = oracle::to_eigen(m.q2) + e2.transpose() * oracle::to_eigen(m.r22) * e2 +
                             acl.transpose() * p2 * acl - p2;
  EXPECT_LE(r1.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(r2.cwiseAbs().maxCoeff(), 1e-10);
}
