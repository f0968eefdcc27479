#include "hsdcov/eigencheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "hsdcov/errors.hpp"
#include "hsdcov/matcore.hpp"

namespace hsdcov {

namespace {

void check_signs(const std::vector<int>& s, std::size_t len, const char* name) {
  if (s.size() != len) {
    throw InvalidArgument(std::string(name) + " has length " + std::to_string(s.size()) +
                          ", expected " + std::to_string(len));
  }
  for (int v : s) {
    if (v != 1 && v != -1) throw InvalidArgument(std::string(name) + " entries must be +1 or -1");
  }
}

double sign_dot(const std::vector<int>& a, const std::vector<int>& b) {
  return static_cast<double>(std::inner_product(a.begin(), a.end(), b.begin(), 0L));
}

/// Roots of x^2 + b x + c = 0 with the discriminant clamped at zero.
std::array<double, 2> quadratic_roots(double b, double c) {
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * c));
  // Cancellation-free pairing: one root from the stable formula, the other
  // from Vieta.
  const double big = -0.5 * (b + std::copysign(disc, b));
  if (big == 0.0) return {0.0, 0.0};
  return {big, c / big};
}

double rel_dev(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

SignDraw random_sign_draw(std::size_t p, std::size_t q, RngStream& rng) {
  auto draw = [&rng](std::size_t len) {
    std::vector<int> s(len);
    for (int& v : s) v = (rng.next_u64() >> 63) != 0 ? 1 : -1;
    return s;
  };
  SignDraw d;
  d.u1 = draw(p);
  d.u2 = draw(p);
  d.v1 = draw(q);
  d.v2 = draw(q);
  return d;
}

EigenCheckReport minimax_eigencheck(const SignDraw& draw, double a) {
  const std::size_t p = draw.u1.size();
  const std::size_t q = draw.v1.size();
  if (p == 0 || q == 0) throw InvalidArgument("sign vectors must be nonempty");
  check_signs(draw.u2, p, "u2");
  check_signs(draw.u1, p, "u1");
  check_signs(draw.v1, q, "v1");
  check_signs(draw.v2, q, "v2");
  if (!std::isfinite(a)) throw InvalidArgument("a must be finite");

  const double pq = static_cast<double>(p) * static_cast<double>(q);
  if (!(std::abs(a) * pq < 1.0)) {
    throw InvalidConstruction("|a| p q = " + std::to_string(std::abs(a) * pq) + " must be below 1");
  }

  const double c1 = a / (2.0 * (1.0 + a * pq));
  const double c2 = a / (2.0 * (1.0 - a * pq));
  const double sq = std::sqrt(static_cast<double>(q));
  const double sp = std::sqrt(static_cast<double>(p));

  const std::size_t d = p + q;
  auto embed = [&](const std::vector<int>& su, const std::vector<int>& sv, double sign) {
    std::vector<double> w(d);
    for (std::size_t i = 0; i < p; ++i) w[i] = sq * su[i];
    for (std::size_t j = 0; j < q; ++j) w[p + j] = sign * sp * sv[j];
    return w;
  };
  const std::array<std::vector<double>, 4> w{embed(draw.u1, draw.v1, 1.0), embed(draw.u2, draw.v2, 1.0),
                                             embed(draw.u1, draw.v1, -1.0), embed(draw.u2, draw.v2, -1.0)};
  const std::array<double, 4> coef{-c1, -c1, c2, c2};

  DenseMatrix s(d, d);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s(i, j) += coef[k] * w[k][i] * w[k][j];
  // Rounding can break exact symmetry of the accumulated sums.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) s(j, i) = s(i, j);
  const std::vector<double> spectrum = sym_eigenvalues(SymmetricMatrix(std::move(s)));

  const double uu = static_cast<double>(q) * sign_dot(draw.u1, draw.u2);
  const double vv = static_cast<double>(p) * sign_dot(draw.v1, draw.v2);
  const double rhs = 1.0 + a * a / (1.0 - a * a * pq * pq) * (pq * pq - uu * vv);

  // On span{(U alpha, V beta)} with U = [u1 u2], V = [v1 v2], the Gram
  // matrices share eigenvectors (1, 1) and (1, -1) with eigenvalues
  // g_u = pq +- uu, g_v = pq +- vv. Each subspace contributes the roots of
  // lambda^2 - d (g_u + g_v) lambda + (d^2 - s^2) g_u g_v.
  const double dd = c2 - c1;
  const double ss = c1 + c2;
  auto pair = [&](double gu, double gv) {
    return quadratic_roots(-dd * (gu + gv), (dd * dd - ss * ss) * gu * gv);
  };
  const auto l12 = pair(pq + uu, pq + vv);
  const auto l34 = pair(pq - uu, pq - vv);
  const std::array<double, 4> closed{l12[0], l12[1], l34[0], l34[1]};

  // Match each closed-form value to its nearest unused numerical eigenvalue.
  // When p + q < 4 the missing eigenvalues are zero.
  std::vector<double> padded = spectrum;
  if (padded.size() < 4) padded.resize(4, 0.0);
  std::vector<bool> used(padded.size(), false);
  std::array<double, 4> matched{};
  for (std::size_t k = 0; k < 4; ++k) {
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < padded.size(); ++i) {
      if (used[i]) continue;
      const double gap = std::abs(padded[i] - closed[k]);
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    used[best] = true;
    matched[k] = padded[best];
  }

  double err = 0.0;
  err = std::max(err, rel_dev((1.0 + matched[0]) * (1.0 + matched[1]), rhs));
  err = std::max(err, rel_dev((1.0 + matched[2]) * (1.0 + matched[3]), rhs));
  err = std::max(err, rel_dev((1.0 + closed[0]) * (1.0 + closed[1]), rhs));
  err = std::max(err, rel_dev((1.0 + closed[2]) * (1.0 + closed[3]), rhs));
  double det = 1.0;
  for (double l : spectrum) det *= 1.0 + l;
  err = std::max(err, rel_dev(det, rhs * rhs));

  EigenCheckReport r{};
  r.max_identity_error = err;
  r.identity_value = rhs;
  r.closed_form_lambdas.assign(closed.begin(), closed.end());
  std::sort(r.closed_form_lambdas.begin(), r.closed_form_lambdas.end());
  for (double l : spectrum) {
    if (std::abs(l) > 1e-8) r.lambda_values.push_back(l);
  }
  r.nontrivial_eigencount = r.lambda_values.size();
  return r;
}

}  // namespace hsdcov
