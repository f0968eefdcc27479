#pragma once

#include <cstddef>

#include "hsdcov/matcore.hpp"

namespace hsdcov {

/// Population covariance of a jointly Gaussian (X, Y) in R^{p+q}, stored as
/// its three distinct blocks. Construction checks conformable shapes and
/// that Sigma + 1e-10 I admits a Cholesky factor.
class CovarianceBlocks {
 public:
  CovarianceBlocks(SymmetricMatrix sigma_x, SymmetricMatrix sigma_y, DenseMatrix sigma_xy);

  /// Sigma_X = I_p, Sigma_Y = I_q and rho on the leading min(p, q) diagonal
  /// of Sigma_XY. For p == q this is the factor-model covariance.
  static CovarianceBlocks identity_blocks(std::size_t p, std::size_t q, double rho);

  std::size_t p() const noexcept { return sigma_x_.dim(); }
  std::size_t q() const noexcept { return sigma_y_.dim(); }

  const SymmetricMatrix& sigma_x() const noexcept { return sigma_x_; }
  const SymmetricMatrix& sigma_y() const noexcept { return sigma_y_; }
  const DenseMatrix& sigma_xy() const noexcept { return sigma_xy_; }

  /// The assembled (p+q) x (p+q) matrix.
  SymmetricMatrix full() const;

 private:
  SymmetricMatrix sigma_x_;
  SymmetricMatrix sigma_y_;
  DenseMatrix sigma_xy_;
};

}  // namespace hsdcov
