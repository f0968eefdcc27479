#pragma once

// Leading-order Gaussian population quantities. Only the main terms are
// computed; remainders are O(1/(tau_X ^ tau_Y)) and never reported as numbers.

#include <cstddef>
#include <string>
#include <vector>

#include "hsdcov/covariance.hpp"
#include "hsdcov/dcov.hpp"

namespace hsdcov {

/// 2 tr(sigma_half).
double tau_sq(const SymmetricMatrix& sigma_half);

/// ||Sigma_XY||_F^2 / (tau_X tau_Y).
double mean_expansion(const CovarianceBlocks& sigma);

struct VarianceParts {
  double first;
  double second;
  double total;
  /// Set when first < 0, which can only happen outside the bounded-spectrum
  /// regime. The value is still reported unclamped.
  bool first_order_negative = false;
};

VarianceParts sigma_bar_sq(const CovarianceBlocks& sigma, std::size_t n);
VarianceParts sigma_bar_sq_marginal(const SymmetricMatrix& sigma_x, std::size_t n);

/// n ||Sigma_XY||_F^2 / (||Sigma_X||_F ||Sigma_Y||_F).
double local_param_A(const CovarianceBlocks& sigma, std::size_t n);

/// f_X'(tau_X/gamma_X) f_Y'(tau_Y/gamma_Y) / (gamma_X gamma_Y). Throws
/// DegenerateKernel if either derivative is below 1e-12 in magnitude.
double varrho(const BlockPair<KernelSpec>& kernels, BlockPair<double> gamma,
              const CovarianceBlocks& sigma);

/// P(|N(m, 1)| > z_{alpha/2}).
double power_from_shift(double m, double alpha);

/// power_from_shift with m = A / sqrt(2).
double theoretical_power(const CovarianceBlocks& sigma, std::size_t n, double alpha);

/// Null standard deviation of dcov*^2: sqrt(2) ||Sigma_X||_F ||Sigma_Y||_F / (n tau_X tau_Y).
double null_sd(const CovarianceBlocks& sigma, std::size_t n);

struct TheoryReport {
  double tau_X_sq;
  double tau_Y_sq;
  double mean;
  double sigma1_sq;
  double sigma2_sq;
  double sigma_sq;
  double A;
  double power;
  std::vector<std::string> warnings;
};

TheoryReport theory_report(const CovarianceBlocks& sigma, std::size_t n, double alpha);

}  // namespace hsdcov
