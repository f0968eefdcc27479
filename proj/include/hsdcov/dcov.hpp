#pragma once

// Sample-level distance covariance: kernelized distance matrices,
// U-centering, the bias-corrected (kernel) distance covariance and
// correlation, bandwidth resolution, and the brute-force fourth-order
// U-statistic used to cross-check the matrix formula.

#include <cstddef>
#include <functional>
#include <string>
#include <variant>

#include "hsdcov/matcore.hpp"

namespace hsdcov {

/// A value for each of the two blocks X and Y.
template <typename T>
struct BlockPair {
  T x;
  T y;
};

/// n aligned observations: X is n x p, Y is n x q.
class PairedSample {
 public:
  PairedSample(DenseMatrix x, DenseMatrix y);

  const DenseMatrix& x() const noexcept { return x_; }
  const DenseMatrix& y() const noexcept { return y_; }
  std::size_t n() const noexcept { return x_.rows(); }
  std::size_t p() const noexcept { return x_.cols(); }
  std::size_t q() const noexcept { return y_.cols(); }

 private:
  DenseMatrix x_;
  DenseMatrix y_;
};

enum class KernelKind { Identity, Gaussian, Laplace, Custom };

/// A radial kernel f applied to scaled distances, with its derivative.
/// Built-ins: identity f(w) = w, Gaussian f(w) = exp(-w^2/2),
/// Laplace f(w) = exp(-w).
class KernelSpec {
 public:
  static KernelSpec identity();
  static KernelSpec gaussian();
  static KernelSpec laplace();
  /// Custom kernels must supply f' explicitly.
  static KernelSpec custom(std::string label, std::function<double(double)> f,
                           std::function<double(double)> f_prime);

  KernelKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  double value(double w) const;
  double derivative(double w) const;

 private:
  KernelSpec(KernelKind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

  KernelKind kind_;
  std::string label_;
  std::function<double(double)> f_;
  std::function<double(double)> f_prime_;
};

/// Parses "identity", "gaussian" or "laplace".
KernelSpec kernel_from_name(const std::string& name);

struct FixedBandwidth {
  double gamma;
};
/// Median of the pairwise distances {|X_s - X_t| : s < t}.
struct MedianHeuristic {};
/// gamma = tau / rho_target, i.e. the bandwidth that makes tau / gamma hit
/// the requested ratio.
struct RhoTarget {
  double rho;
};
using BandwidthSpec = std::variant<FixedBandwidth, MedianHeuristic, RhoTarget>;

/// Textual form used by the CLI: "fixed:<g>", "median", "rho:<r>".
BandwidthSpec parse_bandwidth(const std::string& text);
std::string to_string(const BandwidthSpec& spec);

struct PopulationTau {
  double tau;
};
/// tau-hat = sqrt(mean squared pairwise distance over s != t).
struct EstimateTau {};
using TauSource = std::variant<PopulationTau, EstimateTau>;

/// Result of the U-centering transform; off-diagonal row sums vanish when
/// the input has a zero diagonal.
class UCenteredMatrix {
 public:
  std::size_t n() const noexcept { return m_.dim(); }
  const SymmetricMatrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  friend UCenteredMatrix u_center(const SymmetricMatrix& a);
  explicit UCenteredMatrix(SymmetricMatrix m) : m_(std::move(m)) {}
  SymmetricMatrix m_;
};

/// f(d_kl / gamma) applied to a distance matrix, diagonal forced to zero.
/// Throws NonFinite if f produces a non-finite value.
SymmetricMatrix apply_kernel(const SymmetricMatrix& distances, const KernelSpec& kernel,
                             double gamma);

/// Kernelized distance matrix of the rows of x.
SymmetricMatrix kernel_matrix(const DenseMatrix& x, const KernelSpec& kernel, double gamma);

/// A - (11^T A + A 11^T)/(n-2) + 11^T A 11^T/((n-1)(n-2)). Requires n >= 4.
UCenteredMatrix u_center(const SymmetricMatrix& a);

/// (1/(n(n-3))) sum_{k != l} A*_kl B*_kl.
double u_inner(const UCenteredMatrix& a, const UCenteredMatrix& b);

/// Bias-corrected sample distance covariance. May be negative.
double dcov_star(const PairedSample& sample);

/// dcov_star with Y = X; always >= 0.
double dcov_star_marginal(const DenseMatrix& x);

/// Generalized kernel distance covariance with bandwidths gamma.
double dcov_star_kernel(const PairedSample& sample, const BlockPair<KernelSpec>& kernels,
                        BlockPair<double> gamma);

/// Kernel distance correlation; 0 when DcovTriplet::degenerate().
double dcor_star(const PairedSample& sample, const BlockPair<KernelSpec>& kernels,
                 BlockPair<double> gamma);

/// The cross and the two marginal kernel dcov*^2 values, sharing one
/// U-centering per block.
struct DcovTriplet {
  double xy;
  double xx;
  double yy;
  /// Largest off-diagonal kernel entry per block, in absolute value.
  double scale_x;
  double scale_y;

  /// True when a marginal is zero up to U-centering round-off, i.e. at most
  /// 1e-24 scale^2, or the marginal product is <= 1e-300. Constant data under
  /// a non-identity kernel lands here rather than at an exact zero.
  bool degenerate() const noexcept;
};

/// Works from precomputed distance matrices so repeated kernel or bandwidth
/// choices on the same data skip the O(n^2 p) distance pass.
DcovTriplet dcov_triplet(const SymmetricMatrix& dist_x, const SymmetricMatrix& dist_y,
                         const BlockPair<KernelSpec>& kernels, BlockPair<double> gamma);

double resolve_bandwidth(const DenseMatrix& x, const BandwidthSpec& spec, const TauSource& tau);

/// Same as above on a precomputed distance matrix.
double resolve_bandwidth(const SymmetricMatrix& distances, const BandwidthSpec& spec,
                         const TauSource& tau);

/// Direct fourth-order U-statistic over all 4-subsets, each kernel averaged
/// over the 24 orderings. Restricted to 4 <= n <= 12.
double dcov_ustat_oracle(const PairedSample& sample);

}  // namespace hsdcov
