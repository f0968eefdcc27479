#include "hsdcov/hoeffding.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hsdcov/errors.hpp"

namespace hsdcov {

namespace {

struct Moments {
  double tau_x;
  double tau_y;
  double tau_x_sq;
  double tau_y_sq;
  double tr_x;
  double tr_y;
  double fro_xy_sq;
};

Moments moments(const CovarianceBlocks& sigma) {
  Moments m{};
  m.tr_x = trace(sigma.sigma_x().dense());
  m.tr_y = trace(sigma.sigma_y().dense());
  m.tau_x_sq = 2.0 * m.tr_x;
  m.tau_y_sq = 2.0 * m.tr_y;
  if (!(m.tau_x_sq > 0.0) || !(m.tau_y_sq > 0.0))
    throw InvalidArgument("tau_X and tau_Y must be positive");
  m.tau_x = std::sqrt(m.tau_x_sq);
  m.tau_y = std::sqrt(m.tau_y_sq);
  m.fro_xy_sq = frobenius_norm_sq(sigma.sigma_xy());
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

/// x^T Sigma_XY y.
double bilinear(std::span<const double> x, const DenseMatrix& sxy, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    s += x[i] * dot(sxy.row(i), y);
  }
  return s;
}

void check_dims(std::size_t p, std::size_t q, const CovarianceBlocks& sigma) {
  if (p != sigma.p() || q != sigma.q()) {
    throw DimensionMismatch("data has (p, q) = (" + std::to_string(p) + ", " + std::to_string(q) +
                            ") but the covariance has (" + std::to_string(sigma.p()) + ", " +
                            std::to_string(sigma.q()) + ")");
  }
}

double g1_bar_impl(std::span<const double> x, std::span<const double> y, const DenseMatrix& sxy,
                   const Moments& m) {
  const double cross = bilinear(x, sxy, y) - m.fro_xy_sq;
  const double corr_x = -m.fro_xy_sq / (2.0 * m.tau_x_sq) * (dot(x, x) - m.tr_x);
  const double corr_y = -m.fro_xy_sq / (2.0 * m.tau_y_sq) * (dot(y, y) - m.tr_y);
  return (cross + corr_x + corr_y) / (2.0 * m.tau_x * m.tau_y);
}

double g2_bar_impl(std::span<const double> x1, std::span<const double> y1,
                   std::span<const double> x2, std::span<const double> y2,
                   const DenseMatrix& sxy, const Moments& m) {
  const double main = dot(x1, x2) * dot(y1, y2) - bilinear(x1, sxy, y1) -
                      bilinear(x2, sxy, y2) + m.fro_xy_sq;
  const double cross = bilinear(x1, sxy, y2) + bilinear(x2, sxy, y1);
  return (main - cross) / (6.0 * m.tau_x * m.tau_y);
}

}  // namespace

double g1_bar(std::span<const double> x, std::span<const double> y, const CovarianceBlocks& sigma) {
  check_dims(x.size(), y.size(), sigma);
  return g1_bar_impl(x, y, sigma.sigma_xy(), moments(sigma));
}

double g2_bar(std::span<const double> x1, std::span<const double> y1, std::span<const double> x2,
              std::span<const double> y2, const CovarianceBlocks& sigma) {
  check_dims(x1.size(), y1.size(), sigma);
  check_dims(x2.size(), y2.size(), sigma);
  return g2_bar_impl(x1, y1, x2, y2, sigma.sigma_xy(), moments(sigma));
}

double hoeffding_sum(const PairedSample& sample, const CovarianceBlocks& sigma) {
  check_dims(sample.p(), sample.q(), sigma);
  const std::size_t n = sample.n();
  if (n < 2) throw SampleTooSmall(n, 2);
  const Moments m = moments(sigma);
  const DenseMatrix& sxy = sigma.sigma_xy();
  const DenseMatrix& x = sample.x();
  const DenseMatrix& y = sample.y();

  double first = 0.0;
  for (std::size_t i = 0; i < n; ++i) first += g1_bar_impl(x.row(i), y.row(i), sxy, m);
  first /= static_cast<double>(n);

  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      second += g2_bar_impl(x.row(i), y.row(i), x.row(j), y.row(j), sxy, m);
  second /= 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);

  return 4.0 * first + 6.0 * second;
}

double tbar_fluctuation(const PairedSample& sample, const CovarianceBlocks& sigma) {
  check_dims(sample.p(), sample.q(), sigma);
  const std::size_t n = sample.n();
  if (n < 2) throw SampleTooSmall(n, 2);
  const Moments m = moments(sigma);
  const DenseMatrix& x = sample.x();
  const DenseMatrix& y = sample.y();

  // Rows of X Sigma_XY, so that X_i^T Sigma_XY Y_j is a plain dot product.
  const DenseMatrix xs = x * sigma.sigma_xy();

  double psi1 = 0.0;
  double psi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      psi1 += dot(x.row(i), x.row(j)) * dot(y.row(i), y.row(j)) - m.fro_xy_sq;
      psi2 += dot(xs.row(i), y.row(j)) + dot(xs.row(j), y.row(i));
    }
  }

  double psi3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    psi3 += m.fro_xy_sq / m.tau_x_sq * (dot(x.row(i), x.row(i)) - m.tr_x) +
            m.fro_xy_sq / m.tau_y_sq * (dot(y.row(i), y.row(i)) - m.tr_y);
  }

  // The diagonal X_i^T Sigma_XY Y_i terms of 4 U_n(g1) and 6 U_n(g2) cancel
  // exactly, leaving psi3 with weight 1 / (tau_X tau_Y n).
  const double nd = static_cast<double>(n);
  const double pairs = nd * (nd - 1.0);  // 2 C(n, 2)
  return (psi1 - psi2) / (m.tau_x * m.tau_y * pairs) - psi3 / (m.tau_x * m.tau_y * nd);
}

}  // namespace hsdcov
