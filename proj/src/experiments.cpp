#include "hsdcov/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsdcov/errors.hpp"
#include "hsdcov/normal.hpp"
#include "hsdcov/testkit.hpp"
#include "hsdcov/theory.hpp"

namespace hsdcov {

double ks_distance(std::vector<double> xs) {
  if (xs.empty()) throw InvalidArgument("ks_distance needs a nonempty sample");
  for (double x : xs) {
    if (!std::isfinite(x)) throw NonFinite("ks_distance input contains a non-finite value");
  }
  std::sort(xs.begin(), xs.end());
  const double b = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double phi = normal_cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / b - phi, phi - static_cast<double>(i) / b});
  }
  return d;
}

std::vector<double> empirical_quantiles(std::vector<double> xs, const std::vector<double>& probs) {
  if (xs.empty()) throw InvalidArgument("empirical_quantiles needs a nonempty sample");
  std::sort(xs.begin(), xs.end());
  const double last = static_cast<double>(xs.size() - 1);
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile probabilities must lie in [0, 1]");
    const double pos = p * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back(xs[lo] + frac * (xs[hi] - xs[lo]));
  }
  return out;
}

std::vector<double> qq_probs() {
  std::vector<double> probs(99);
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = static_cast<double>(i + 1) / 100.0;
  return probs;
}

CovarianceBlocks source_blocks(const DataSource& source) {
  if (const auto* scn = std::get_if<SimScenario>(&source)) return implied_blocks(*scn);
  return std::get<GaussianSource>(source).sigma;
}

std::size_t source_n(const DataSource& source) {
  if (const auto* scn = std::get_if<SimScenario>(&source)) return scn->n;
  return std::get<GaussianSource>(source).n;
}

PairedSample draw_sample(const DataSource& source, RngStream& rng) {
  if (const auto* scn = std::get_if<SimScenario>(&source)) return sample_factor(*scn, rng);
  const auto& g = std::get<GaussianSource>(source);
  return sample_gaussian(g.sigma, g.n, rng);
}

Standardization standardization_from_name(const std::string& name) {
  if (name == "theory") return Standardization::TheorySigma;
  if (name == "null") return Standardization::NullSigma;
  if (name == "empirical") return Standardization::EmpiricalSigma;
  throw InvalidArgument("unknown standardization '" + name + "' (expected theory, null or empirical)");
}

std::string to_string(Standardization s) {
  switch (s) {
    case Standardization::TheorySigma: return "theory";
    case Standardization::NullSigma: return "null";
    case Standardization::EmpiricalSigma: return "empirical";
  }
  return "empirical";
}

Centering centering_from_name(const std::string& name) {
  if (name == "theory") return Centering::TheoryMean;
  if (name == "empirical") return Centering::EmpiricalMean;
  throw InvalidArgument("unknown centering '" + name + "' (expected theory or empirical)");
}

std::string to_string(Centering c) {
  return c == Centering::TheoryMean ? "theory" : "empirical";
}

namespace {

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

BlockPair<TauSource> population_tau(const CovarianceBlocks& sigma) {
  return {PopulationTau{std::sqrt(tau_sq(sigma.sigma_x()))},
          PopulationTau{std::sqrt(tau_sq(sigma.sigma_y()))}};
}

template <typename Fn>
auto with_replication_context(std::size_t r, Fn fn) {
  try {
    return fn();
  } catch (const ReplicationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ReplicationError(r, e.what());
  }
}

}  // namespace

CltResult run_clt(const CltConfig& cfg) {
  if (cfg.reps < 2) throw InvalidArgument("run_clt needs at least 2 replications");
  const CovarianceBlocks sigma = source_blocks(cfg.source);
  const std::size_t n = source_n(cfg.source);
  if (n < 4) throw SampleTooSmall(n, 4);
  const BlockPair<TauSource> tau = population_tau(sigma);

  CltResult res{};
  res.statistics = parallel_map(cfg.reps, cfg.threads, [&](std::size_t r) {
    return with_replication_context(r, [&] {
      RngStream rng = derive_stream(cfg.seed, cfg.reuse_stream ? 0 : r);
      const SampleDistances dist = SampleDistances::of(draw_sample(cfg.source, rng));
      const BlockPair<double> gamma{resolve_bandwidth(dist.x, cfg.bandwidths.x, tau.x),
                                    resolve_bandwidth(dist.y, cfg.bandwidths.y, tau.y)};
      const DcovTriplet t = dcov_triplet(dist.x, dist.y, cfg.kernels, gamma);
      return t.xy / varrho(cfg.kernels, gamma, sigma);
    });
  });

  const double sample_mean = mean_of(res.statistics);
  switch (cfg.standardize) {
    case Standardization::EmpiricalSigma:
      res.center = sample_mean;
      res.scale = sd_of(res.statistics, sample_mean);
      break;
    case Standardization::TheorySigma:
      res.center = cfg.center == Centering::TheoryMean ? mean_expansion(sigma) : sample_mean;
      res.scale = std::sqrt(sigma_bar_sq(sigma, n).total);
      break;
    case Standardization::NullSigma:
      res.center = cfg.center == Centering::TheoryMean ? mean_expansion(sigma) : sample_mean;
      res.scale = null_sd(sigma, n);
      break;
  }
  if (!(res.scale > 0.0) || !std::isfinite(res.scale)) {
    throw DegenerateSample("standardization scale is not positive (" + to_string(cfg.standardize) + ")");
  }

  res.standardized.reserve(cfg.reps);
  for (double s : res.statistics) res.standardized.push_back((s - res.center) / res.scale);
  res.probs = qq_probs();
  res.sample_quantiles = empirical_quantiles(res.standardized, res.probs);
  res.normal_quantiles.reserve(res.probs.size());
  for (double p : res.probs) res.normal_quantiles.push_back(-normal_quantile(p));
  res.ks_distance = ks_distance(res.standardized);
  return res;
}

namespace {

struct KernelConfig {
  KernelSpec kernel;
  BandwidthSpec bandwidth;
};

std::vector<KernelConfig> expand_configs(const PowerConfig& cfg) {
  std::vector<KernelConfig> out;
  for (const KernelSpec& k : cfg.kernels) {
    if (k.kind() == KernelKind::Identity) {
      // The identity-kernel test statistic does not depend on the bandwidth.
      out.push_back({k, FixedBandwidth{1.0}});
      continue;
    }
    for (const BandwidthSpec& b : cfg.bandwidths) out.push_back({k, b});
  }
  return out;
}

}  // namespace

PowerResult run_power(const PowerConfig& cfg) {
  if (cfg.reps < 1) throw InvalidArgument("run_power needs at least 1 replication");
  if (cfg.rho_grid.empty()) throw InvalidArgument("run_power needs a nonempty rho grid");
  if (cfg.kernels.empty()) throw InvalidArgument("run_power needs at least one kernel");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  for (double rho : cfg.rho_grid) SimScenario{cfg.base.n, cfg.base.p, rho, cfg.base.dist}.validate();
  if (cfg.base.n < 4) throw SampleTooSmall(cfg.base.n, 4);

  const bool needs_bandwidth = std::any_of(cfg.kernels.begin(), cfg.kernels.end(),
                                           [](const KernelSpec& k) { return k.kind() != KernelKind::Identity; });
  if (needs_bandwidth && cfg.bandwidths.empty())
    throw InvalidArgument("non-identity kernels need at least one bandwidth");
  const std::vector<KernelConfig> configs = expand_configs(cfg);

  const std::size_t cells = cfg.rho_grid.size();
  const double tau = std::sqrt(2.0 * static_cast<double>(cfg.base.p));
  const std::size_t total = cells * cfg.reps;

  const auto rejections = parallel_map(total, cfg.threads, [&](std::size_t task) {
    const std::size_t cell = task / cfg.reps;
    const std::size_t r = task % cfg.reps;
    return with_replication_context(r, [&] {
      const SimScenario scn{cfg.base.n, cfg.base.p, cfg.rho_grid[cell], cfg.base.dist};
      RngStream rng = derive_stream(cfg.seed, (static_cast<std::uint64_t>(cell) << 32) | r);
      const SampleDistances dist = SampleDistances::of(sample_factor(scn, rng));
      std::vector<char> rejected(configs.size());
      for (std::size_t c = 0; c < configs.size(); ++c) {
        TestOptions opts;
        opts.alpha = cfg.alpha;
        opts.kernels = {configs[c].kernel, configs[c].kernel};
        opts.bandwidths = {configs[c].bandwidth, configs[c].bandwidth};
        opts.tau = {PopulationTau{tau}, PopulationTau{tau}};
        rejected[c] = dcor_test(dist, opts).reject ? 1 : 0;
      }
      return rejected;
    });
  });

  PowerResult res;
  const double b = static_cast<double>(cfg.reps);
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t count = 0;
      for (std::size_t r = 0; r < cfg.reps; ++r) count += rejections[cell * cfg.reps + r][c];
      const double rate = static_cast<double>(count) / b;
      const SimScenario scn{cfg.base.n, cfg.base.p, cfg.rho_grid[cell], cfg.base.dist};
      res.rows.push_back({configs[c].kernel.label(), to_string(configs[c].bandwidth), cfg.rho_grid[cell],
                          rate, theoretical_power(implied_blocks(scn), cfg.base.n, cfg.alpha),
                          std::sqrt(rate * (1.0 - rate) / b)});
    }
  }
  return res;
}

}  // namespace hsdcov
