#include "catchup/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace catchup::game {

namespace {

constexpr double kUnitCircle = 1.0 - 1e-9;
constexpr double kRankTol = 1e-9;
constexpr double kSqrtFloor = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("GameModel: " + what);
}

// Rank over ℂ of X + iY, through the real embedding [[X, −Y], [Y, X]] whose
// rank is twice the complex rank.
std::size_t complex_rank(const Matrix& x, const Matrix& y) {
  const std::size_t r = x.rows();
  const std::size_t c = x.cols();
  Matrix e(2 * r, 2 * c);
  e.set_block(0, 0, x);
  e.set_block(0, c, -y);
  e.set_block(r, 0, y);
  e.set_block(r, c, x);
  return linalg::numerical_rank(e, kRankTol) / 2;
}

std::string format_eig(std::complex<double> z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "-") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

void UncertaintyBlock::validate(std::size_t state_dim) const {
  const std::size_t np = p_dim();
  const std::size_t nq = q_dim();
  require(np > 0 && nq > 0, "uncertainty block with zero dimension");
  require(s0.rows() == np && s0.cols() == nq, "S0 must be p_dim × q_dim");
  require(aq_rows.rows() == nq && aq_rows.cols() == state_dim, "A_q rows must be q_dim × state_dim");
  require(g.rows() == nq && g.cols() == np, "G must be q_dim × p_dim");
}

std::size_t GameModel::p_dim() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.p_dim();
  return n;
}

std::size_t GameModel::q_dim() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.q_dim();
  return n;
}

int check_player(int player) {
  if (player != 1 && player != 2) throw std::invalid_argument("player index must be 1 or 2");
  return player;
}

const Matrix& GameModel::b(int player) const { return check_player(player) == 1 ? b1 : b2; }
const SymmetricMatrix& GameModel::q(int player) const { return check_player(player) == 1 ? q1 : q2; }
const SymmetricMatrix& GameModel::r_own(int player) const { return check_player(player) == 1 ? r11 : r22; }
const SymmetricMatrix& GameModel::r_cross(int player) const { return check_player(player) == 1 ? r12 : r21; }

Matrix GameModel::aq() const {
  std::vector<Matrix> rows;
  for (const auto& b : blocks) rows.push_back(b.aq_rows);
  return linalg::vstack(rows);
}

Matrix GameModel::g() const {
  std::vector<Matrix> parts;
  for (const auto& b : blocks) parts.push_back(b.g);
  return linalg::block_diagonal(parts);
}

SymmetricMatrix GameModel::q0() const {
  std::vector<Matrix> parts;
  for (const auto& b : blocks) parts.push_back(b.q0.to_matrix());
  return SymmetricMatrix::from_upper(linalg::block_diagonal(parts));
}

Matrix GameModel::s0() const {
  std::vector<Matrix> parts;
  for (const auto& b : blocks) parts.push_back(b.s0);
  return linalg::block_diagonal(parts);
}

SymmetricMatrix GameModel::r0() const {
  std::vector<Matrix> parts;
  for (const auto& b : blocks) parts.push_back(b.r0.to_matrix());
  return SymmetricMatrix::from_upper(linalg::block_diagonal(parts));
}

void GameModel::validate() const {
  const std::size_t n = state_dim();
  require(n > 0 && a.is_square(), "A must be square and nonempty");
  require(b1.rows() == n && b1.cols() > 0, "B1 must have state_dim rows");
  require(b2.rows() == n && b2.cols() > 0, "B2 must have state_dim rows");
  require(!blocks.empty(), "at least one uncertainty block is required");
  for (const auto& b : blocks) b.validate(n);
  require(h.rows() == n && h.cols() == p_dim(), "H must be state_dim × p_dim");
  require(q1.dim() == n && q2.dim() == n, "Q1, Q2 must be state_dim square");
  require(r11.dim() == u1_dim() && r21.dim() == u1_dim(), "R11, R21 must be u1_dim square");
  require(r22.dim() == u2_dim() && r12.dim() == u2_dim(), "R22, R12 must be u2_dim square");
  require(linalg::is_positive_semidefinite(q1), "Q1 must be positive semidefinite");
  require(linalg::is_positive_semidefinite(q2), "Q2 must be positive semidefinite");
  require(linalg::is_positive_definite(r11), "R11 must be positive definite");
  require(linalg::is_positive_definite(r22), "R22 must be positive definite");
  require(linalg::is_positive_semidefinite(r12), "R12 must be positive semidefinite");
  require(linalg::is_positive_semidefinite(r21), "R21 must be positive semidefinite");
}

SymmetricMatrix xi0(const UncertaintyBlock& b) {
  const Matrix s0g = b.s0 * b.g;
  Matrix x = b.q0.to_matrix() + s0g + s0g.transpose() + b.g.transpose() * b.r0.to_matrix() * b.g;
  return SymmetricMatrix::symmetrize(x);
}

SymmetricMatrix xi0(const GameModel& m) {
  std::vector<Matrix> parts;
  for (const auto& b : m.blocks) parts.push_back(xi0(b).to_matrix());
  return SymmetricMatrix::from_upper(linalg::block_diagonal(parts));
}

Matrix s0_cal(const UncertaintyBlock& b) { return b.s0.transpose() + b.r0.to_matrix() * b.g; }

Matrix s0_cal(const GameModel& m) {
  std::vector<Matrix> parts;
  for (const auto& b : m.blocks) parts.push_back(s0_cal(b));
  return linalg::block_diagonal(parts);
}

Assumption1Report check_assumption1(const GameModel& m) {
  Assumption1Report r;
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    const auto& b = m.blocks[j];
    const double rmin = linalg::min_eigenvalue(b.r0);
    if (rmin < -1e-12) {
      r.passed = false;
      r.offending_block = j;
      r.failed_condition = "R0";
      r.eigenvalue = rmin;
      r.message = "block " + std::to_string(j + 1) + ": R0 is not positive semidefinite (min eigenvalue " +
                  std::to_string(rmin) + ")";
      return r;
    }
    const double xmax = linalg::max_eigenvalue(xi0(b));
    if (!(xmax < 0.0)) {
      r.passed = false;
      r.offending_block = j;
      r.failed_condition = "Xi0";
      r.eigenvalue = xmax;
      r.message = "block " + std::to_string(j + 1) + ": Xi0 is not negative definite (max eigenvalue " +
                  std::to_string(xmax) + ")";
      return r;
    }
  }
  r.message = "R0 >= 0 and Xi0 < 0 for every block";
  return r;
}

Assumption2Report check_assumption2(const GameModel& m) {
  Assumption2Report r;
  const std::size_t n = m.state_dim();

  // C with CᵀC = Q1 + Q2 from the eigendecomposition square root.
  const auto eig = linalg::sym_eigendecompose(m.q1 + m.q2);
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < n; ++k)
    if (eig.values[k] > kSqrtFloor) keep.push_back(k);
  Matrix c(keep.size(), n);
  for (std::size_t r_ = 0; r_ < keep.size(); ++r_) {
    const double s = std::sqrt(eig.values[keep[r_]]);
    for (std::size_t j = 0; j < n; ++j) c(r_, j) = s * eig.vectors(j, keep[r_]);
  }

  const Matrix b = linalg::hstack(std::vector<Matrix>{m.b1, m.b2});
  std::ostringstream msg;
  for (const auto& lambda : linalg::eigenvalues(m.a)) {
    if (std::abs(lambda) < kUnitCircle) continue;
    r.unstable_eigenvalues.push_back(lambda);
    Matrix shifted_re = m.a;
    Matrix shifted_im(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      shifted_re(i, i) -= lambda.real();
      shifted_im(i, i) = -lambda.imag();
    }
    const Matrix ctrl_re = linalg::hstack(std::vector<Matrix>{shifted_re, b});
    const Matrix ctrl_im = linalg::hstack(std::vector<Matrix>{shifted_im, Matrix(n, b.cols())});
    if (complex_rank(ctrl_re, ctrl_im) < n) {
      r.stabilizable = false;
      msg << "(A, [B1 B2]) not stabilizable at eigenvalue " << format_eig(lambda) << "; ";
    }
    Matrix obs_re = shifted_re;
    Matrix obs_im = shifted_im;
    if (c.rows() > 0) {
      obs_re = linalg::vstack(std::vector<Matrix>{shifted_re, c});
      obs_im = linalg::vstack(std::vector<Matrix>{shifted_im, Matrix(c.rows(), n)});
    }
    if (complex_rank(obs_re, obs_im) < n) {
      r.detectable = false;
      msg << "(A, Q1+Q2) not detectable at eigenvalue " << format_eig(lambda) << "; ";
    }
  }
  r.message = r.passed() ? "stabilizable and detectable" : msg.str();
  return r;
}

double omega_form(const UncertaintyBlock& block, std::span<const double> p, std::span<const double> q) {
  if (p.size() != block.p_dim() || q.size() != block.q_dim()) {
    throw std::invalid_argument("omega_form: vector dimensions do not match the block");
  }
  const Vector s0q = block.s0 * q;
  return linalg::quadratic_form(block.q0, p) + 2.0 * linalg::dot(p, s0q) + linalg::quadratic_form(block.r0, q);
}

bool omega_membership(const UncertaintyBlock& block, std::span<const double> p, std::span<const double> q) {
  return omega_form(block, p, q) >= -1e-12;
}

}  // namespace catchup::game
