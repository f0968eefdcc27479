#include "hsdcov/dcov.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hsdcov/errors.hpp"

namespace hsdcov {

PairedSample::PairedSample(DenseMatrix x, DenseMatrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.rows()) {
    throw DimensionMismatch("X has " + std::to_string(x_.rows()) + " rows but Y has " +
                            std::to_string(y_.rows()));
  }
  if (x_.rows() == 0) throw SampleTooSmall(0, 1);
  require_finite(x_, "X");
  require_finite(y_, "Y");
}

// ---------------------------------------------------------------------------
// Kernels

KernelSpec KernelSpec::identity() { return KernelSpec(KernelKind::Identity, "identity"); }
KernelSpec KernelSpec::gaussian() { return KernelSpec(KernelKind::Gaussian, "gaussian"); }
KernelSpec KernelSpec::laplace() { return KernelSpec(KernelKind::Laplace, "laplace"); }

KernelSpec KernelSpec::custom(std::string label, std::function<double(double)> f,
                              std::function<double(double)> f_prime) {
  if (!f || !f_prime) throw InvalidArgument("custom kernel needs both f and f'");
  KernelSpec k(KernelKind::Custom, std::move(label));
  k.f_ = std::move(f);
  k.f_prime_ = std::move(f_prime);
  return k;
}

double KernelSpec::value(double w) const {
  switch (kind_) {
    case KernelKind::Identity:
      return w;
    case KernelKind::Gaussian:
      return std::exp(-0.5 * w * w);
    case KernelKind::Laplace:
      return std::exp(-w);
    case KernelKind::Custom:
      return f_(w);
  }
  return w;
}

double KernelSpec::derivative(double w) const {
  switch (kind_) {
    case KernelKind::Identity:
      return 1.0;
    case KernelKind::Gaussian:
      return -w * std::exp(-0.5 * w * w);
    case KernelKind::Laplace:
      return -std::exp(-w);
    case KernelKind::Custom:
      return f_prime_(w);
  }
  return 1.0;
}

KernelSpec kernel_from_name(const std::string& name) {
  if (name == "identity") return KernelSpec::identity();
  if (name == "gaussian") return KernelSpec::gaussian();
  if (name == "laplace") return KernelSpec::laplace();
  throw InvalidArgument("unknown kernel '" + name + "' (expected identity, gaussian or laplace)");
}

// ---------------------------------------------------------------------------
// Bandwidths

namespace {

double parse_positive(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v) || v <= 0.0)
    throw InvalidArgument("bandwidth '" + context + "' needs a positive number");
  return v;
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

BandwidthSpec parse_bandwidth(const std::string& text) {
  if (text == "median") return MedianHeuristic{};
  if (text.rfind("fixed:", 0) == 0) return FixedBandwidth{parse_positive(text.substr(6), text)};
  if (text.rfind("rho:", 0) == 0) return RhoTarget{parse_positive(text.substr(4), text)};
  throw InvalidArgument("unknown bandwidth '" + text + "' (expected fixed:<g>, median or rho:<r>)");
}

std::string to_string(const BandwidthSpec& spec) {
  struct Visitor {
    std::string operator()(const FixedBandwidth& f) const { return "fixed:" + format_number(f.gamma); }
    std::string operator()(const MedianHeuristic&) const { return "median"; }
    std::string operator()(const RhoTarget& r) const { return "rho:" + format_number(r.rho); }
  };
  return std::visit(Visitor{}, spec);
}

namespace {

double checked_fixed(const FixedBandwidth& fixed) {
  if (!(fixed.gamma > 0.0) || !std::isfinite(fixed.gamma))
    throw InvalidArgument("fixed bandwidth must be positive");
  return fixed.gamma;
}

double checked_rho(const RhoTarget& target) {
  if (!(target.rho > 0.0) || !std::isfinite(target.rho))
    throw InvalidArgument("rho target must be positive");
  return target.rho;
}

double checked_tau(const PopulationTau& pop) {
  if (!(pop.tau > 0.0) || !std::isfinite(pop.tau))
    throw InvalidArgument("population tau must be positive");
  return pop.tau;
}

}  // namespace

double resolve_bandwidth(const SymmetricMatrix& distances, const BandwidthSpec& spec,
                         const TauSource& tau_source) {
  const std::size_t n = distances.dim();

  if (const auto* fixed = std::get_if<FixedBandwidth>(&spec)) return checked_fixed(*fixed);

  if (std::holds_alternative<MedianHeuristic>(spec)) {
    if (n < 2) throw SampleTooSmall(n, 2);
    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) d.push_back(distances(s, t));
    // Lower median for an even number of pairs.
    const std::size_t k = (d.size() - 1) / 2;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    const double median = d[k];
    if (!(median > 0.0)) {
      const bool all_zero = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
      throw DegenerateSample(all_zero ? "all pairwise distances are zero"
                                      : "median pairwise distance is zero");
    }
    return median;
  }

  const double rho = checked_rho(std::get<RhoTarget>(spec));
  if (const auto* pop = std::get_if<PopulationTau>(&tau_source)) return checked_tau(*pop) / rho;

  if (n < 2) throw SampleTooSmall(n, 2);
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) sum_sq += distances(s, t) * distances(s, t);
  const double tau =
      std::sqrt(sum_sq / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1)));
  if (!(tau > 0.0)) throw DegenerateSample("all pairwise distances are zero");
  return tau / rho;
}

double resolve_bandwidth(const DenseMatrix& x, const BandwidthSpec& spec, const TauSource& tau) {
  if (const auto* fixed = std::get_if<FixedBandwidth>(&spec)) return checked_fixed(*fixed);
  if (const auto* target = std::get_if<RhoTarget>(&spec)) {
    if (const auto* pop = std::get_if<PopulationTau>(&tau)) return checked_tau(*pop) / checked_rho(*target);
  }
  return resolve_bandwidth(pairwise_distances(x), spec, tau);
}

// ---------------------------------------------------------------------------
// Matrices and estimators

SymmetricMatrix apply_kernel(const SymmetricMatrix& distances, const KernelSpec& kernel,
                             double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidArgument("bandwidth must be positive, got " + std::to_string(gamma));
  const std::size_t n = distances.dim();
  SymmetricMatrix out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const double w = distances(k, l) / gamma;
      const double v = kernel.value(w);
      if (!std::isfinite(v))
        throw NonFinite("kernel '" + kernel.label() + "' is not finite at " + std::to_string(w));
      out.set(k, l, v);
    }
  }
  return out;
}

SymmetricMatrix kernel_matrix(const DenseMatrix& x, const KernelSpec& kernel, double gamma) {
  return apply_kernel(pairwise_distances(x), kernel, gamma);
}

UCenteredMatrix u_center(const SymmetricMatrix& a) {
  const std::size_t n = a.dim();
  if (n < 4) throw SampleTooSmall(n, 4);

  std::vector<double> row_sum(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = a.row(k);
    row_sum[k] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  const double total = std::accumulate(row_sum.begin(), row_sum.end(), 0.0);
  const double nd = static_cast<double>(n);
  const double grand = total / ((nd - 1.0) * (nd - 2.0));

  // Symmetric input: the column sums equal the row sums.
  SymmetricMatrix out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      out.set(k, l, a(k, l) - (row_sum[k] + row_sum[l]) / (nd - 2.0) + grand);
    }
  }
  return UCenteredMatrix(std::move(out));
}

double u_inner(const UCenteredMatrix& a, const UCenteredMatrix& b) {
  const std::size_t n = a.n();
  if (b.n() != n) throw DimensionMismatch("U-centred matrices differ in size");
  if (n < 4) throw SampleTooSmall(n, 4);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto ra = a.matrix().row(k);
    const auto rb = b.matrix().row(k);
    double row = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l != k) row += ra[l] * rb[l];
    }
    s += row;
  }
  const double nd = static_cast<double>(n);
  return s / (nd * (nd - 3.0));
}

namespace {

double max_abs(const SymmetricMatrix& m) {
  double v = 0.0;
  for (double e : m.dense().entries()) v = std::max(v, std::abs(e));
  return v;
}

void require_n4(std::size_t n) {
  if (n < 4) throw SampleTooSmall(n, 4);
}

}  // namespace

double dcov_star(const PairedSample& sample) {
  require_n4(sample.n());
  return u_inner(u_center(pairwise_distances(sample.x())), u_center(pairwise_distances(sample.y())));
}

double dcov_star_marginal(const DenseMatrix& x) {
  require_n4(x.rows());
  const UCenteredMatrix a = u_center(pairwise_distances(x));
  return u_inner(a, a);
}

double dcov_star_kernel(const PairedSample& sample, const BlockPair<KernelSpec>& kernels,
                        BlockPair<double> gamma) {
  require_n4(sample.n());
  const UCenteredMatrix a = u_center(kernel_matrix(sample.x(), kernels.x, gamma.x));
  const UCenteredMatrix b = u_center(kernel_matrix(sample.y(), kernels.y, gamma.y));
  return u_inner(a, b);
}

double dcor_star(const PairedSample& sample, const BlockPair<KernelSpec>& kernels,
                 BlockPair<double> gamma) {
  require_n4(sample.n());
  const DcovTriplet t = dcov_triplet(pairwise_distances(sample.x()), pairwise_distances(sample.y()),
                                     kernels, gamma);
  if (t.degenerate()) return 0.0;
  return t.xy / std::sqrt(t.xx * t.yy);
}

DcovTriplet dcov_triplet(const SymmetricMatrix& dist_x, const SymmetricMatrix& dist_y,
                         const BlockPair<KernelSpec>& kernels, BlockPair<double> gamma) {
  if (dist_x.dim() != dist_y.dim()) {
    throw DimensionMismatch("distance matrices have " + std::to_string(dist_x.dim()) + " and " +
                            std::to_string(dist_y.dim()) + " rows");
  }
  require_n4(dist_x.dim());
  const SymmetricMatrix kx = apply_kernel(dist_x, kernels.x, gamma.x);
  const SymmetricMatrix ky = apply_kernel(dist_y, kernels.y, gamma.y);
  const UCenteredMatrix a = u_center(kx);
  const UCenteredMatrix b = u_center(ky);
  return {u_inner(a, b), u_inner(a, a), u_inner(b, b), max_abs(kx), max_abs(ky)};
}

bool DcovTriplet::degenerate() const noexcept {
  constexpr double roundoff = 1e-24;
  return !(xx > roundoff * scale_x * scale_x) || !(yy > roundoff * scale_y * scale_y) ||
         !(xx * yy > 1e-300);
}

// ---------------------------------------------------------------------------
// Brute-force U-statistic

namespace {

double row_distance(const DenseMatrix& m, std::size_t i, std::size_t j) {
  const auto a = m.row(i);
  const auto b = m.row(j);
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double dcov_ustat_oracle(const PairedSample& sample) {
  const std::size_t n = sample.n();
  if (n < 4 || n > 12)
    throw InvalidArgument("dcov_ustat_oracle supports 4 <= n <= 12, got " + std::to_string(n));

  std::vector<double> a(n * n), b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = row_distance(sample.x(), i, j);
      b[i * n + j] = row_distance(sample.y(), i, j);
    }
  }

  double total = 0.0;
  std::size_t subsets = 0;
  std::array<std::size_t, 4> idx{};
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = idx[0] + 1; idx[1] < n; ++idx[1])
      for (idx[2] = idx[1] + 1; idx[2] < n; ++idx[2])
        for (idx[3] = idx[2] + 1; idx[3] < n; ++idx[3]) {
          std::array<std::size_t, 4> perm = idx;
          double k = 0.0;
          do {
            const std::size_t i1 = perm[0], i2 = perm[1], i3 = perm[2], i4 = perm[3];
            const double ax = a[i1 * n + i2];
            k += ax * b[i1 * n + i2] + ax * b[i3 * n + i4] - 2.0 * ax * b[i1 * n + i3];
          } while (std::next_permutation(perm.begin(), perm.end()));
          total += k / 24.0;
          ++subsets;
        }
  return total / static_cast<double>(subsets);
}

}  // namespace hsdcov
