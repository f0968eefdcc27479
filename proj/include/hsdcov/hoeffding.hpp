#pragma once

// The truncated sample distance covariance keeps the Hoeffding components of
// order <= 2 with their Gaussian main-term kernels. Its constant term (the
// population dcov^2) has no closed form, so both routes below return the
// fluctuation around it.

#include <span>

#include "hsdcov/covariance.hpp"
#include "hsdcov/dcov.hpp"

namespace hsdcov {

/// Main term of the first-order Hoeffding kernel at one observation (x, y).
double g1_bar(std::span<const double> x, std::span<const double> y, const CovarianceBlocks& sigma);

/// Main term of the second-order Hoeffding kernel at two observations.
double g2_bar(std::span<const double> x1, std::span<const double> y1, std::span<const double> x2,
              std::span<const double> y2, const CovarianceBlocks& sigma);

/// 4 U_n(g1_bar) + 6 U_n(g2_bar), by direct O(n) and O(n^2) kernel sums.
double hoeffding_sum(const PairedSample& sample, const CovarianceBlocks& sigma);

/// The same quantity through the psi_1, psi_2, psi_3 representation:
/// (psi1 - psi2) / (tau_X tau_Y * 2 C(n,2)) - psi3 / (tau_X tau_Y n), with
/// psi3 = sum_i ||Sigma_XY||^2 [(||X_i||^2 - tr Sigma_X)/tau_X^2 + (||Y_i||^2 - tr Sigma_Y)/tau_Y^2].
double tbar_fluctuation(const PairedSample& sample, const CovarianceBlocks& sigma);

}  // namespace hsdcov
