#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hsdcov/covariance.hpp"
#include "hsdcov/matcore.hpp"
#include "hsdcov/simgen.hpp"

namespace fixtures {

using hsdcov::DenseMatrix;
using hsdcov::RngStream;
using hsdcov::SymmetricMatrix;

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
  DenseMatrix m(rows, cols);
  for (double& v : m.entries()) v = rng.normal();
  return m;
}

/// A + A^T A + dim I for Gaussian A.
inline SymmetricMatrix random_spd(std::size_t dim, RngStream& rng) {
  const DenseMatrix a = random_matrix(dim, dim, rng);
  DenseMatrix s = a.transposed() * a;
  for (std::size_t i = 0; i < dim; ++i) {
    s(i, i) += static_cast<double>(dim);
    for (std::size_t j = 0; j < dim; ++j) s(i, j) += 0.5 * (a(i, j) + a(j, i));
  }
  return SymmetricMatrix(std::move(s));
}

/// Modified Gram-Schmidt on a Gaussian matrix.
inline DenseMatrix random_orthogonal(std::size_t dim, RngStream& rng) {
  DenseMatrix q = random_matrix(dim, dim, rng);
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double d = 0.0;
      for (std::size_t r = 0; r < dim; ++r) d += q(r, c) * q(r, prev);
      for (std::size_t r = 0; r < dim; ++r) q(r, c) -= d * q(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < dim; ++r) norm += q(r, c) * q(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < dim; ++r) q(r, c) /= norm;
  }
  return q;
}

/// |a - b| <= tol (1 + |b|).
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

/// |a - b| <= tol |b|, exact equality when b == 0.
inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

/// Splits a random SPD matrix of size p + q into covariance blocks.
inline hsdcov::CovarianceBlocks random_blocks(std::size_t p, std::size_t q, RngStream& rng) {
  const SymmetricMatrix full = random_spd(p + q, rng);
  DenseMatrix sx(p, p), sy(q, q), sxy(p, q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) sx(i, j) = full(i, j);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) sy(i, j) = full(p + i, p + j);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) sxy(i, j) = full(i, p + j);
  return hsdcov::CovarianceBlocks(SymmetricMatrix(std::move(sx)), SymmetricMatrix(std::move(sy)), std::move(sxy));
}

}  // namespace fixtures
