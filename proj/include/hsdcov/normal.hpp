#pragma once

namespace hsdcov {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper-tail quantile: P(N(0,1) > z) = alpha. Requires 0 < alpha < 1.
double normal_quantile(double alpha);

/// Two-sided p-value 2(1 - Phi(|z|)).
double two_sided_p_value(double z);

}  // namespace hsdcov
