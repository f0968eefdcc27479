#pragma once

// Reproducible data generation. Every draw is a pure function of
// (master seed, stream index) so replications can run on any thread.

#include <array>
#include <cstdint>
#include <string>

#include "hsdcov/covariance.hpp"
#include "hsdcov/dcov.hpp"

namespace hsdcov {

/// One Philox4x32-10 block: ten rounds over a 128-bit counter and 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// Philox4x32-10 in counter mode. The key is splitmix64(master_seed), counter
/// words 2-3 carry the stream index and words 0-1 the block number, so
/// distinct indices address disjoint counter ranges.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return index_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // remaining 64-bit words in buffer_, 0..2
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index);

enum class NoiseDist { StdNormal, UniformSqrt3, ScaledT4 };

/// "normal", "uniform", "t4".
NoiseDist noise_from_name(const std::string& name);
std::string to_string(NoiseDist dist);

/// One mean-zero, variance-one draw.
double draw_noise(NoiseDist dist, RngStream& rng);

/// X_j = sqrt(rho) Z1 + sqrt(1-rho) Z2, Y_j = sqrt(rho) Z1 + sqrt(1-rho) Z3,
/// independently for every coordinate j and row i, q = p.
struct SimScenario {
  std::size_t n;
  std::size_t p;
  double rho;
  NoiseDist dist = NoiseDist::StdNormal;

  /// Throws InvalidArgument unless n >= 1, p >= 1 and 0 <= rho < 1.
  void validate() const;
};

/// Rows i.i.d. N(0, Sigma) as L z with L the Cholesky factor of the full Sigma.
PairedSample sample_gaussian(const CovarianceBlocks& sigma, std::size_t n, RngStream& rng);

PairedSample sample_factor(const SimScenario& scn, RngStream& rng);

/// Second moments of the factor model: Sigma_X = Sigma_Y = I_p, Sigma_XY = rho I_p.
/// Exact for every noise distribution since the noise has unit variance.
CovarianceBlocks implied_blocks(const SimScenario& scn);

}  // namespace hsdcov
