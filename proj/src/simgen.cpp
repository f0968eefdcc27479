#include "hsdcov/simgen.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "hsdcov/errors.hpp"

namespace hsdcov {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53U;
  constexpr std::uint32_t m1 = 0xCD9E8D57U;
  constexpr std::uint32_t w0 = 0x9E3779B9U;
  constexpr std::uint32_t w1 = 0xBB67AE85U;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), index_(stream_index) {
  const std::uint64_t k = splitmix64(master_seed);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void RngStream::refill() {
  buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)},
                          key_);
  ++block_;
  buffered_ = 2;
}

std::uint64_t RngStream::next_u64() {
  if (buffered_ == 0) refill();
  const int word = 2 - buffered_;
  --buffered_;
  return (static_cast<std::uint64_t>(buffer_[2 * word]) << 32) | buffer_[2 * word + 1];
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RngStream(master_seed, index);
}

NoiseDist noise_from_name(const std::string& name) {
  if (name == "normal") return NoiseDist::StdNormal;
  if (name == "uniform") return NoiseDist::UniformSqrt3;
  if (name == "t4") return NoiseDist::ScaledT4;
  throw InvalidArgument("unknown noise distribution '" + name + "' (expected normal, uniform or t4)");
}

std::string to_string(NoiseDist dist) {
  switch (dist) {
    case NoiseDist::StdNormal: return "normal";
    case NoiseDist::UniformSqrt3: return "uniform";
    case NoiseDist::ScaledT4: return "t4";
  }
  return "normal";
}

double draw_noise(NoiseDist dist, RngStream& rng) {
  switch (dist) {
    case NoiseDist::StdNormal:
      return rng.normal();
    case NoiseDist::UniformSqrt3:
      return std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
    case NoiseDist::ScaledT4: {
      // t_4 = Z / sqrt(chi2_4 / 4) has variance 2; dividing by sqrt(2) gives 1.
      const double z = rng.normal();
      double chi2 = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double g = rng.normal();
        chi2 += g * g;
      }
      return z / std::sqrt(chi2 / 4.0) / std::numbers::sqrt2;
    }
  }
  return 0.0;
}

void SimScenario::validate() const {
  if (n < 1) throw InvalidArgument("scenario needs n >= 1");
  if (p < 1) throw InvalidArgument("scenario needs p >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("scenario needs 0 <= rho < 1");
}

PairedSample sample_gaussian(const CovarianceBlocks& sigma, std::size_t n, RngStream& rng) {
  if (n < 1) throw InvalidArgument("sample_gaussian needs n >= 1");
  const std::size_t p = sigma.p();
  const std::size_t d = p + sigma.q();
  const DenseMatrix l = cholesky(sigma.full());

  DenseMatrix x(n, p);
  DenseMatrix y(n, sigma.q());
  std::vector<double> z(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : z) v = rng.normal();
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c <= r; ++c) s += l(r, c) * z[c];
      if (r < p) {
        x(i, r) = s;
      } else {
        y(i, r - p) = s;
      }
    }
  }
  return PairedSample(std::move(x), std::move(y));
}

PairedSample sample_factor(const SimScenario& scn, RngStream& rng) {
  scn.validate();
  const double a = std::sqrt(scn.rho);
  const double b = std::sqrt(1.0 - scn.rho);
  DenseMatrix x(scn.n, scn.p);
  DenseMatrix y(scn.n, scn.p);
  for (std::size_t i = 0; i < scn.n; ++i) {
    for (std::size_t j = 0; j < scn.p; ++j) {
      const double z1 = draw_noise(scn.dist, rng);
      const double z2 = draw_noise(scn.dist, rng);
      const double z3 = draw_noise(scn.dist, rng);
      x(i, j) = a * z1 + b * z2;
      y(i, j) = a * z1 + b * z3;
    }
  }
  return PairedSample(std::move(x), std::move(y));
}

CovarianceBlocks implied_blocks(const SimScenario& scn) {
  scn.validate();
  return CovarianceBlocks::identity_blocks(scn.p, scn.p, scn.rho);
}

}  // namespace hsdcov
