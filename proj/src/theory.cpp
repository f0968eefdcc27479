#include "hsdcov/theory.hpp"

#include <cmath>
#include <string>

#include "hsdcov/errors.hpp"
#include "hsdcov/normal.hpp"

namespace hsdcov {

namespace {

struct Taus {
  double x_sq;
  double y_sq;
};

Taus positive_taus(const CovarianceBlocks& sigma) {
  const Taus t{tau_sq(sigma.sigma_x()), tau_sq(sigma.sigma_y())};
  if (!(t.x_sq > 0.0) || !(t.y_sq > 0.0)) throw InvalidArgument("tau_X^2 and tau_Y^2 must be positive");
  return t;
}

void require_n(std::size_t n) {
  if (n < 2) throw SampleTooSmall(n, 2);
}

}  // namespace

double tau_sq(const SymmetricMatrix& sigma_half) { return 2.0 * trace(sigma_half.dense()); }

double mean_expansion(const CovarianceBlocks& sigma) {
  const Taus t = positive_taus(sigma);
  return frobenius_norm_sq(sigma.sigma_xy()) / std::sqrt(t.x_sq * t.y_sq);
}

VarianceParts sigma_bar_sq(const CovarianceBlocks& sigma, std::size_t n) {
  require_n(n);
  const Taus t = positive_taus(sigma);
  const DenseMatrix& sx = sigma.sigma_x().dense();
  const DenseMatrix& sy = sigma.sigma_y().dense();
  const DenseMatrix& sxy = sigma.sigma_xy();
  const DenseMatrix syx = sxy.transposed();

  const double c2 = frobenius_norm_sq(sxy);
  const double c4 = c2 * c2;
  const double fx = frobenius_norm_sq(sx);
  const double fy = frobenius_norm_sq(sy);

  const double bracket = frobenius_norm_sq(sxy * syx) + trace_chain({sxy, sy, syx, sx}) +
                         c4 * fx / (2.0 * t.x_sq * t.x_sq) + c4 * fy / (2.0 * t.y_sq * t.y_sq) -
                         2.0 * c2 / t.x_sq * trace_chain({sxy, syx, sx}) -
                         2.0 * c2 / t.y_sq * trace_chain({syx, sxy, sy}) +
                         c4 * c2 / (t.x_sq * t.y_sq);

  const double nd = static_cast<double>(n);
  VarianceParts v{};
  v.first = 4.0 * bracket / (nd * t.x_sq * t.y_sq);
  v.second = 2.0 * (fx * fy + c4) / (nd * (nd - 1.0) * t.x_sq * t.y_sq);
  v.total = v.first + v.second;
  v.first_order_negative = v.first < 0.0;
  return v;
}

VarianceParts sigma_bar_sq_marginal(const SymmetricMatrix& sigma_x, std::size_t n) {
  require_n(n);
  const DenseMatrix& sx = sigma_x.dense();
  const double tr = trace(sx);
  if (!(tr > 0.0)) throw InvalidArgument("tr Sigma_X must be positive");
  const double tr2 = tr * tr;
  const double f = frobenius_norm_sq(sx);

  const double bracket = 2.0 * frobenius_norm_sq(sx * sx) + f * f * f / (2.0 * tr2) -
                         2.0 * f * trace_chain({sx, sx, sx}) / tr;
  const double nd = static_cast<double>(n);
  VarianceParts v{};
  v.first = bracket / (nd * tr2);
  v.second = f * f / (nd * (nd - 1.0) * tr2);
  v.total = v.first + v.second;
  v.first_order_negative = v.first < 0.0;
  return v;
}

double local_param_A(const CovarianceBlocks& sigma, std::size_t n) {
  const double fx = frobenius_norm_sq(sigma.sigma_x().dense());
  const double fy = frobenius_norm_sq(sigma.sigma_y().dense());
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("Sigma_X and Sigma_Y must be nonzero");
  return static_cast<double>(n) * frobenius_norm_sq(sigma.sigma_xy()) / std::sqrt(fx * fy);
}

double varrho(const BlockPair<KernelSpec>& kernels, BlockPair<double> gamma,
              const CovarianceBlocks& sigma) {
  if (!(gamma.x > 0.0) || !(gamma.y > 0.0) || !std::isfinite(gamma.x) || !std::isfinite(gamma.y))
    throw InvalidArgument("bandwidths must be positive and finite");
  const Taus t = positive_taus(sigma);
  const double dx = kernels.x.derivative(std::sqrt(t.x_sq) / gamma.x);
  const double dy = kernels.y.derivative(std::sqrt(t.y_sq) / gamma.y);
  if (!(std::abs(dx) >= 1e-12)) throw DegenerateKernel("f_X' vanishes at tau_X/gamma_X (" + kernels.x.label() + ")");
  if (!(std::abs(dy) >= 1e-12)) throw DegenerateKernel("f_Y' vanishes at tau_Y/gamma_Y (" + kernels.y.label() + ")");
  return dx * dy / (gamma.x * gamma.y);
}

double power_from_shift(double m, double alpha) {
  const double z = normal_quantile(alpha / 2.0);
  return normal_cdf(m - z) + normal_cdf(-m - z);
}

double theoretical_power(const CovarianceBlocks& sigma, std::size_t n, double alpha) {
  return power_from_shift(local_param_A(sigma, n) / std::sqrt(2.0), alpha);
}

double null_sd(const CovarianceBlocks& sigma, std::size_t n) {
  require_n(n);
  const Taus t = positive_taus(sigma);
  const double fx = frobenius_norm_sq(sigma.sigma_x().dense());
  const double fy = frobenius_norm_sq(sigma.sigma_y().dense());
  return std::sqrt(2.0 * fx * fy) / (static_cast<double>(n) * std::sqrt(t.x_sq * t.y_sq));
}

TheoryReport theory_report(const CovarianceBlocks& sigma, std::size_t n, double alpha) {
  const VarianceParts v = sigma_bar_sq(sigma, n);
  TheoryReport r{};
  r.tau_X_sq = tau_sq(sigma.sigma_x());
  r.tau_Y_sq = tau_sq(sigma.sigma_y());
  r.mean = mean_expansion(sigma);
  r.sigma1_sq = v.first;
  r.sigma2_sq = v.second;
  r.sigma_sq = v.total;
  r.A = local_param_A(sigma, n);
  r.power = theoretical_power(sigma, n, alpha);
  if (v.first_order_negative) {
    r.warnings.push_back("sigma1_sq is negative; Sigma is outside the bounded-spectrum regime");
  }
  if (!(v.total > 0.0)) r.warnings.push_back("sigma_sq is not positive");
  return r;
}

}  // namespace hsdcov
