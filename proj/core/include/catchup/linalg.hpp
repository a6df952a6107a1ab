#pragma once

// Dense real matrix kernels for small problems (dimension up to ~20).
//
// Storage is row-major throughout. SymmetricMatrix keeps only the upper
// triangle, so symmetry holds by construction rather than by convention.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace catchup::linalg {

using Vector = std::vector<double>;

/// Base class for every numerical failure raised by the library.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class NotPositiveDefiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws std::invalid_argument on a size mismatch or a non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> v);
  static Matrix row(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim, double diagonal = 0.0);

  static SymmetricMatrix identity(std::size_t n) { return SymmetricMatrix(n, 1.0); }
  static SymmetricMatrix diagonal(std::span<const double> d);
  /// (m + mᵀ)/2.
  static SymmetricMatrix symmetrize(const Matrix& m);
  /// Takes the upper triangle of m and ignores the lower one.
  static SymmetricMatrix from_upper(const Matrix& m);

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { data_[index(i, j)] = v; }
  void add(std::size_t i, std::size_t j, double v) { data_[index(i, j)] += v; }

  /// Packed upper triangle, row by row.
  std::span<const double> packed() const { return data_; }

  Matrix to_matrix() const;
  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  SymmetricMatrix& operator+=(const SymmetricMatrix& o);
  SymmetricMatrix& operator-=(const SymmetricMatrix& o);
  SymmetricMatrix& operator*=(double s);

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * dim_ - i * (i + 1) / 2 + j;
  }

  std::size_t dim_ = 0;
  std::vector<double> data_;
};

SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b);
SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b);
SymmetricMatrix operator*(SymmetricMatrix a, double s);
SymmetricMatrix operator*(double s, SymmetricMatrix a);

/// bᵀ·m·b, symmetrized.
SymmetricMatrix congruence(const Matrix& b, const SymmetricMatrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double quadratic_form(const SymmetricMatrix& m, std::span<const double> x);

Matrix block_diagonal(std::span<const Matrix> blocks);
Matrix hstack(std::span<const Matrix> blocks);
Matrix vstack(std::span<const Matrix> blocks);

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi. Throws ConvergenceError after max_sweeps.
EigenDecomposition sym_eigendecompose(const SymmetricMatrix& m, int max_sweeps = 100);

Vector sym_eigenvalues(const SymmetricMatrix& m);
double max_eigenvalue(const SymmetricMatrix& m);
double min_eigenvalue(const SymmetricMatrix& m);

/// True iff the largest eigenvalue is below -margin.
bool is_negative_definite(const SymmetricMatrix& m, double margin = 0.0);
bool is_positive_definite(const SymmetricMatrix& m, double margin = 0.0);
bool is_positive_semidefinite(const SymmetricMatrix& m, double tolerance = 1e-12);

/// LU with partial pivoting. Throws SingularMatrixError when the reciprocal
/// 1-norm condition number falls below ~machine precision.
Matrix solve_linear(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);
/// ‖a‖₁·‖a⁻¹‖₁, or +inf for an exactly singular matrix.
double condition_estimate(const Matrix& a);

/// Eigenvalues of a general square matrix (unordered).
std::vector<std::complex<double>> eigenvalues(const Matrix& a);
double spectral_radius(const Matrix& a);

/// Lower-triangular L with m = L·Lᵀ. Throws NotPositiveDefiniteError.
Matrix cholesky(const SymmetricMatrix& m);
bool try_cholesky(const SymmetricMatrix& m, Matrix& lower);
SymmetricMatrix invert_spd(const SymmetricMatrix& m);

/// Descending singular values via one-sided Jacobi.
Vector singular_values(const Matrix& a);
/// Count of singular values above rel_tol·σ_max.
std::size_t numerical_rank(const Matrix& a, double rel_tol = 1e-9);

}  // namespace catchup::linalg
