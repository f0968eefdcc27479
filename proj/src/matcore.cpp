#include "hsdcov/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hsdcov/errors.hpp"

namespace hsdcov {

namespace {

std::string dims(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("entry count " + std::to_string(data_.size()) +
                            " does not match shape " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionMismatch("ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimensionMismatch("cannot add " + dims(*this) + " and " + dims(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimensionMismatch("cannot subtract " + dims(other) + " from " + dims(*this));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("cannot multiply " + dims(a) + " by " + dims(b));
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

SymmetricMatrix::SymmetricMatrix(DenseMatrix m) : m_(std::move(m)) {
  if (!m_.is_square()) throw DimensionMismatch("symmetric matrix must be square, got " + dims(m_));
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (std::size_t j = i + 1; j < m_.cols(); ++j) {
      const double a = m_(i, j);
      const double b = m_(j, i);
      if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) {
        throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
    }
  }
}

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.all_finite()) throw NonFinite(std::string(what) + " contains non-finite entries");
}

double frobenius_norm_sq(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.entries()) s += v * v;
  return s;
}

double trace(const DenseMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("trace of non-square " + dims(m));
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

double trace_chain(std::span<const MatrixRef> chain) {
  if (chain.empty()) throw InvalidArgument("trace_chain needs at least one matrix");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i].get().cols() != chain[i + 1].get().rows())
      throw DimensionMismatch("trace_chain: factor " + std::to_string(i) + " is " +
                              dims(chain[i].get()) + " but factor " + std::to_string(i + 1) +
                              " is " + dims(chain[i + 1].get()));
  }
  if (chain.front().get().rows() != chain.back().get().cols())
    throw DimensionMismatch("trace_chain: product is not square");

  if (chain.size() == 1) return trace(chain.front().get());

  // Collapse everything but the last factor, then tr(L R) = sum_ij L_ij R_ji.
  DenseMatrix left = chain.front().get();
  for (std::size_t i = 1; i + 1 < chain.size(); ++i) left = left * chain[i].get();
  const DenseMatrix& right = chain.back().get();
  double t = 0.0;
  for (std::size_t i = 0; i < left.rows(); ++i)
    for (std::size_t j = 0; j < left.cols(); ++j) t += left(i, j) * right(j, i);
  return t;
}

double trace_chain(std::initializer_list<MatrixRef> chain) {
  return trace_chain(std::span<const MatrixRef>(chain.begin(), chain.size()));
}

DenseMatrix cholesky(const SymmetricMatrix& s) {
  const std::size_t n = s.dim();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, s(i, i));
  const double pivot_floor = static_cast<double>(n) * 1e-12 * max_diag;

  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor)) {
      throw NotPositiveDefinite("cholesky pivot " + std::to_string(j) + " is " +
                                std::to_string(d));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

std::vector<double> sym_eigenvalues(const SymmetricMatrix& s, JacobiOptions opts) {
  const std::size_t n = s.dim();
  DenseMatrix a = s.dense();
  const double scale = std::sqrt(frobenius_norm_sq(a));
  const double target = opts.relative_tolerance * scale;

  auto off_norm = [&] {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(off);
  };

  double off = off_norm();
  int sweep = 0;
  while (off > target) {
    if (sweep++ == opts.max_sweeps)
      throw ConvergenceFailure("jacobi eigensolver did not converge", off);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p, q); the smaller root keeps |angle| <= pi/4.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
    off = off_norm();
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

SymmetricMatrix pairwise_sq_distances(const DenseMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();

  // Distances are translation invariant; centring shrinks the norms that the
  // expansion subtracts from each other.
  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= static_cast<double>(n == 0 ? 1 : n);
  DenseMatrix c(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    auto cr = c.row(i);
    for (std::size_t j = 0; j < p; ++j) cr[j] = r[j] - mean[j];
  }

  std::vector<double> sq_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = c.row(i);
    sq_norm[i] = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  }

  SymmetricMatrix d(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto rk = c.row(k);
    for (std::size_t l = k + 1; l < n; ++l) {
      const auto rl = c.row(l);
      const double dot = std::inner_product(rk.begin(), rk.end(), rl.begin(), 0.0);
      d.set(k, l, std::max(0.0, sq_norm[k] + sq_norm[l] - 2.0 * dot));
    }
  }
  return d;
}

SymmetricMatrix pairwise_distances(const DenseMatrix& x) {
  SymmetricMatrix d = pairwise_sq_distances(x);
  for (std::size_t k = 0; k < d.dim(); ++k)
    for (std::size_t l = k + 1; l < d.dim(); ++l) d.set(k, l, std::sqrt(d(k, l)));
  return d;
}

}  // namespace hsdcov
