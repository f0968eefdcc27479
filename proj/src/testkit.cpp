#include "hsdcov/testkit.hpp"

#include <cmath>

#include "hsdcov/errors.hpp"

namespace hsdcov {

SampleDistances SampleDistances::of(const PairedSample& sample) {
  return {pairwise_distances(sample.x()), pairwise_distances(sample.y())};
}

std::string kernel_label(const BlockPair<KernelSpec>& kernels) {
  if (kernels.x.label() == kernels.y.label()) return kernels.x.label();
  return kernels.x.label() + "/" + kernels.y.label();
}

TestResult dcor_test(const PairedSample& sample, const TestOptions& opts) {
  if (sample.n() < 4) throw SampleTooSmall(sample.n(), 4);
  return dcor_test(SampleDistances::of(sample), opts);
}

TestResult dcor_test(const SampleDistances& distances, const TestOptions& opts) {
  if (distances.n() < 4) throw SampleTooSmall(distances.n(), 4);
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");

  TestResult r;
  r.threshold = normal_quantile(opts.alpha / 2.0);
  r.kernel_label = kernel_label(opts.kernels);
  try {
    r.bandwidth_used = {resolve_bandwidth(distances.x, opts.bandwidths.x, opts.tau.x),
                        resolve_bandwidth(distances.y, opts.bandwidths.y, opts.tau.y)};
  } catch (const DegenerateSample&) {
    // A data-driven bandwidth is undefined only for constant blocks.
    r.degenerate = true;
    return r;
  }

  const DcovTriplet t = dcov_triplet(distances.x, distances.y, opts.kernels, r.bandwidth_used);
  if (t.degenerate()) {
    r.degenerate = true;
    return r;
  }
  r.statistic = static_cast<double>(distances.n()) * t.xy / std::sqrt(2.0 * t.xx * t.yy);
  r.p_value = two_sided_p_value(r.statistic);
  r.reject = std::abs(r.statistic) > r.threshold;
  return r;
}

}  // namespace hsdcov
