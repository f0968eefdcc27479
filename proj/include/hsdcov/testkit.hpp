#pragma once

// The (kernel) distance correlation test of independence. The statistic is
// n dcov*^2(X,Y) / sqrt(2 dcov*^2(X) dcov*^2(Y)), compared against z_{alpha/2}.

#include <string>

#include "hsdcov/dcov.hpp"
#include "hsdcov/normal.hpp"

namespace hsdcov {

struct TestResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
  double p_value = 1.0;
  std::string kernel_label;
  BlockPair<double> bandwidth_used{0.0, 0.0};
  /// A marginal dcov*^2 vanished; statistic is 0 and the test does not reject.
  bool degenerate = false;
};

struct TestOptions {
  double alpha = 0.05;
  BlockPair<KernelSpec> kernels{KernelSpec::identity(), KernelSpec::identity()};
  BlockPair<BandwidthSpec> bandwidths{FixedBandwidth{1.0}, FixedBandwidth{1.0}};
  BlockPair<TauSource> tau{EstimateTau{}, EstimateTau{}};
};

/// Euclidean distance matrices of both blocks, computed once and shared by
/// every kernel and bandwidth evaluated on the same sample.
struct SampleDistances {
  SymmetricMatrix x;
  SymmetricMatrix y;

  static SampleDistances of(const PairedSample& sample);
  std::size_t n() const noexcept { return x.dim(); }
};

TestResult dcor_test(const PairedSample& sample, const TestOptions& opts);
TestResult dcor_test(const SampleDistances& distances, const TestOptions& opts);

/// Label shared by reports: "<kernel_x>" when both blocks agree, else "<x>/<y>".
std::string kernel_label(const BlockPair<KernelSpec>& kernels);

}  // namespace hsdcov
