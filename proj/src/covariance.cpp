#include "hsdcov/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsdcov/errors.hpp"

namespace hsdcov {

CovarianceBlocks::CovarianceBlocks(SymmetricMatrix sigma_x, SymmetricMatrix sigma_y,
                                   DenseMatrix sigma_xy)
    : sigma_x_(std::move(sigma_x)), sigma_y_(std::move(sigma_y)), sigma_xy_(std::move(sigma_xy)) {
  if (sigma_xy_.rows() != sigma_x_.dim() || sigma_xy_.cols() != sigma_y_.dim()) {
    throw DimensionMismatch("Sigma_XY is " + std::to_string(sigma_xy_.rows()) + "x" +
                            std::to_string(sigma_xy_.cols()) + " but the marginal blocks are " +
                            std::to_string(sigma_x_.dim()) + " and " +
                            std::to_string(sigma_y_.dim()));
  }
  require_finite(sigma_x_.dense(), "Sigma_X");
  require_finite(sigma_y_.dense(), "Sigma_Y");
  require_finite(sigma_xy_, "Sigma_XY");

  DenseMatrix jittered = full().dense();
  for (std::size_t i = 0; i < jittered.rows(); ++i) jittered(i, i) += 1e-10;
  try {
    (void)cholesky(SymmetricMatrix(std::move(jittered)));
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(std::string("covariance is not positive semidefinite: ") + e.what());
  }
}

CovarianceBlocks CovarianceBlocks::identity_blocks(std::size_t p, std::size_t q, double rho) {
  DenseMatrix xy(p, q);
  for (std::size_t i = 0; i < std::min(p, q); ++i) xy(i, i) = rho;
  return CovarianceBlocks(SymmetricMatrix::identity(p), SymmetricMatrix::identity(q),
                          std::move(xy));
}

SymmetricMatrix CovarianceBlocks::full() const {
  const std::size_t p = this->p();
  const std::size_t q = this->q();
  DenseMatrix s(p + q, p + q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) s(i, j) = sigma_x_(i, j);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) s(p + i, p + j) = sigma_y_(i, j);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      s(i, p + j) = sigma_xy_(i, j);
      s(p + j, i) = sigma_xy_(i, j);
    }
  }
  return SymmetricMatrix(std::move(s));
}

}  // namespace hsdcov
