#pragma once

// Small dense linear-algebra kernel: a row-major matrix type, a validated
// symmetric wrapper, and the handful of operations the estimators and the
// Gaussian theory need.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace hsdcov {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  /// Builds a matrix from nested row lists; all rows must have equal length.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> entries() noexcept { return data_; }

  DenseMatrix transposed() const;
  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(DenseMatrix a, double s);
DenseMatrix operator*(double s, DenseMatrix a);
/// Matrix product; throws DimensionMismatch when inner sizes differ.
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// Square matrix whose symmetry was checked on construction:
/// |M[i][j] - M[j][i]| <= 1e-12 * (1 + |M[i][j]|).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(DenseMatrix m);
  SymmetricMatrix(std::size_t dim, double fill) : m_(dim, dim, fill) {}

  static SymmetricMatrix identity(std::size_t n) { return SymmetricMatrix(DenseMatrix::identity(n)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const DenseMatrix& dense() const noexcept { return m_; }
  std::span<const double> row(std::size_t r) const { return m_.row(r); }

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  DenseMatrix m_;
};

/// Throws NonFinite naming `what` if any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const char* what);

double frobenius_norm_sq(const DenseMatrix& m);
double trace(const DenseMatrix& m);

using MatrixRef = std::reference_wrapper<const DenseMatrix>;

/// Trace of the ordered product M1 M2 ... Mk. The final pair is contracted
/// entrywise so the full product is never formed.
double trace_chain(std::span<const MatrixRef> chain);
double trace_chain(std::initializer_list<MatrixRef> chain);

/// Lower-triangular L with L L^T = S. Throws NotPositiveDefinite when a pivot
/// falls to dim * 1e-12 * max(diag S) or below.
DenseMatrix cholesky(const SymmetricMatrix& s);

struct JacobiOptions {
  double relative_tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Eigenvalues in nondecreasing order, by cyclic Jacobi rotations. Converged
/// when the off-diagonal Frobenius norm drops to tolerance * ||S||_F.
std::vector<double> sym_eigenvalues(const SymmetricMatrix& s, JacobiOptions opts = {});

/// Squared Euclidean distances between the rows of x. Columns are centred
/// before the ||a||^2 + ||b||^2 - 2 a.b expansion; negative round-off is
/// clamped to zero and the diagonal is exactly zero.
SymmetricMatrix pairwise_sq_distances(const DenseMatrix& x);

/// Elementwise square root of pairwise_sq_distances.
SymmetricMatrix pairwise_distances(const DenseMatrix& x);

}  // namespace hsdcov
