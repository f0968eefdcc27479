#pragma once

// Monte-Carlo runners. Replication r always draws from derive_stream(seed, r)
// (power grids use index (cell << 32) | r), and results are folded in index
// order, so output never depends on the thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "hsdcov/covariance.hpp"
#include "hsdcov/dcov.hpp"
#include "hsdcov/simgen.hpp"

namespace hsdcov {

/// Runs fn(0..count-1) on up to `threads` workers and returns the results in
/// index order. If any call throws, the exception of the lowest failing index
/// is rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// sup_x |F_B(x) - Phi(x)| for the empirical CDF F_B of xs.
double ks_distance(std::vector<double> xs);

/// Type-7 quantiles: linear interpolation of the sorted sample at
/// position p (B - 1), zero-based.
std::vector<double> empirical_quantiles(std::vector<double> xs, const std::vector<double>& probs);

/// 0.01, 0.02, ..., 0.99.
std::vector<double> qq_probs();

struct GaussianSource {
  CovarianceBlocks sigma;
  std::size_t n;
};
using DataSource = std::variant<SimScenario, GaussianSource>;

/// Population covariance of the source.
CovarianceBlocks source_blocks(const DataSource& source);
std::size_t source_n(const DataSource& source);
PairedSample draw_sample(const DataSource& source, RngStream& rng);

enum class Standardization { TheorySigma, NullSigma, EmpiricalSigma };
enum class Centering { TheoryMean, EmpiricalMean };

Standardization standardization_from_name(const std::string& name);
std::string to_string(Standardization s);
Centering centering_from_name(const std::string& name);
std::string to_string(Centering c);

struct CltConfig {
  DataSource source;
  BlockPair<KernelSpec> kernels{KernelSpec::identity(), KernelSpec::identity()};
  BlockPair<BandwidthSpec> bandwidths{FixedBandwidth{1.0}, FixedBandwidth{1.0}};
  std::size_t reps = 200;
  Standardization standardize = Standardization::EmpiricalSigma;
  /// Ignored under EmpiricalSigma, which always uses the sample mean.
  Centering center = Centering::TheoryMean;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Every replication draws from stream 0. Diagnostic only.
  bool reuse_stream = false;
};

struct CltResult {
  /// dcov*^2 / varrho(gamma) per replication; plain dcov*^2 for the identity
  /// kernel at gamma = 1.
  std::vector<double> statistics;
  std::vector<double> standardized;
  std::vector<double> probs;
  std::vector<double> normal_quantiles;
  std::vector<double> sample_quantiles;
  double ks_distance;
  /// Centre and scale actually applied.
  double center;
  double scale;
};

/// Rho-target bandwidths resolve against the population tau of the source.
CltResult run_clt(const CltConfig& cfg);

struct PowerConfig {
  /// n, p and noise; rho is taken from rho_grid.
  SimScenario base{200, 50, 0.0, NoiseDist::StdNormal};
  std::vector<double> rho_grid;
  std::vector<KernelSpec> kernels{KernelSpec::identity()};
  std::vector<BandwidthSpec> bandwidths{FixedBandwidth{1.0}};
  double alpha = 0.05;
  std::size_t reps = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PowerRow {
  std::string kernel;
  std::string bandwidth;
  double rho;
  double empirical_power;
  double theoretical_power;
  double std_err;
};

struct PowerResult {
  /// Ordered by kernel config (kernels x bandwidths, the identity kernel
  /// once at fixed:1), then by rho in grid order.
  std::vector<PowerRow> rows;
};

/// All kernel configurations of a cell share the same replicated datasets.
PowerResult run_power(const PowerConfig& cfg);

}  // namespace hsdcov
