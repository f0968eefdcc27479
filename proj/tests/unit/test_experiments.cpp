#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "fixtures.hpp"
#include "hsdcov/errors.hpp"
#include "hsdcov/experiments.hpp"
#include "hsdcov/normal.hpp"
#include "hsdcov/testkit.hpp"
#include "hsdcov/theory.hpp"

using namespace hsdcov;

namespace {

/// sup |F_B - Phi| evaluated from both one-sided limits at every sample point
/// by counting, without relying on sorted order.
double reference_ks(const std::vector<double>& xs) {
  const double b = static_cast<double>(xs.size());
  double d = 0.0;
  for (double t : xs) {
    double below = 0.0, at_or_below = 0.0;
    for (double x : xs) {
      below += x < t ? 1.0 : 0.0;
      at_or_below += x <= t ? 1.0 : 0.0;
    }
    const double phi = normal_cdf(t);
    d = std::max({d, std::abs(at_or_below / b - phi), std::abs(below / b - phi)});
  }
  return d;
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

CltConfig small_clt(double rho) {
  CltConfig cfg;
  cfg.source = SimScenario{40, 10, rho, NoiseDist::StdNormal};
  cfg.reps = 60;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("ks_distance examples") {
  for (std::size_t b : {1u, 7u, 100u}) {
    std::vector<double> xs(b);
    for (std::size_t i = 0; i < b; ++i) xs[i] = -normal_quantile((static_cast<double>(i) + 0.5) / b);
    CHECK(std::abs(ks_distance(xs) - 0.5 / static_cast<double>(b)) <= 1e-12);
  }
  CHECK(ks_distance({0.0, 0.0, 0.0, 0.0}) == 0.5);
  CHECK_THROWS_AS(ks_distance({}), InvalidArgument);
  CHECK_THROWS_AS(ks_distance({std::numeric_limits<double>::infinity()}), NonFinite);
  CHECK_THROWS_AS(ks_distance({0.0, std::nan("")}), NonFinite);
}

TEST_CASE("ks_distance matches a counting oracle") {
  RngStream rng(81, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t b = 1 + static_cast<std::size_t>(rng.uniform() * 60);
    std::vector<double> xs(b);
    // Rounded values force ties.
    for (double& x : xs) x = std::round(4.0 * (rng.normal() + 0.3)) / 4.0;
    const double d = ks_distance(xs);
    CHECK(std::abs(d - reference_ks(xs)) <= 1e-15);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("empirical_quantiles") {
  CHECK(empirical_quantiles({3, 1, 2}, {0.5}) == std::vector<double>{2});
  CHECK(empirical_quantiles({0, 10}, {0.25}) == std::vector<double>{2.5});
  CHECK(empirical_quantiles({4, -1, 7}, {0.0, 1.0}) == std::vector<double>{-1, 7});
  CHECK(empirical_quantiles({5}, {0.01, 0.99}) == std::vector<double>{5, 5});
  CHECK(empirical_quantiles({4, -1, 7}, {1e-300})[0] == Catch::Approx(-1.0));
  CHECK_THROWS_AS(empirical_quantiles({}, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(empirical_quantiles({1, 2}, {1.5}), InvalidArgument);

  RngStream rng(82, 0);
  std::vector<double> xs(37);
  for (double& x : xs) x = rng.normal();
  const auto q = empirical_quantiles(xs, qq_probs());
  REQUIRE(q.size() == 99);
  for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i - 1] <= q[i]);
}

TEST_CASE("qq_probs") {
  const auto p = qq_probs();
  REQUIRE(p.size() == 99);
  CHECK(p.front() == 0.01);
  CHECK(p.back() == 0.99);
  CHECK(p[49] == 0.5);
}

TEST_CASE("parallel_map keeps index order and reports the lowest failure") {
  for (unsigned threads : {1u, 3u, 8u}) {
    const auto sq = parallel_map(50, threads, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < sq.size(); ++i) CHECK(sq[i] == i * i);
    try {
      parallel_map(20, threads, [](std::size_t i) -> int {
        if (i == 7 || i == 13) throw ReplicationError(i, "boom");
        return 0;
      });
      FAIL("expected an exception");
    } catch (const ReplicationError& e) {
      CHECK(e.replication() == 7);
    }
  }
  CHECK(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST_CASE("standardization names") {
  for (Standardization s : {Standardization::TheorySigma, Standardization::NullSigma, Standardization::EmpiricalSigma})
    CHECK(standardization_from_name(to_string(s)) == s);
  for (Centering c : {Centering::TheoryMean, Centering::EmpiricalMean}) CHECK(centering_from_name(to_string(c)) == c);
  CHECK_THROWS_AS(standardization_from_name("robust"), InvalidArgument);
  CHECK_THROWS_AS(centering_from_name("median"), InvalidArgument);
}

TEST_CASE("run_clt with empirical standardization") {
  const CltResult r = run_clt(small_clt(0.2));
  REQUIRE(r.standardized.size() == 60);
  CHECK(std::abs(mean_of(r.standardized)) <= 1e-12);
  double ss = 0.0;
  for (double z : r.standardized) ss += z * z;
  CHECK(std::abs(std::sqrt(ss / 59.0) - 1.0) <= 1e-12);
  CHECK(r.probs == qq_probs());
  CHECK(r.sample_quantiles == empirical_quantiles(r.standardized, r.probs));
  CHECK(r.ks_distance == ks_distance(r.standardized));
  for (std::size_t i = 0; i < r.probs.size(); ++i)
    CHECK(std::abs(normal_cdf(r.normal_quantiles[i]) - r.probs[i]) <= 1e-9);
  CHECK(r.center == mean_of(r.statistics));
}

TEST_CASE("run_clt identity-kernel statistics are dcov_star") {
  const CltConfig cfg = small_clt(0.3);
  const CltResult r = run_clt(cfg);
  for (std::size_t i : {0u, 17u, 59u}) {
    RngStream rng = derive_stream(cfg.seed, i);
    CHECK(fixtures::rel_close(r.statistics[i], dcov_star(draw_sample(cfg.source, rng)), 1e-12));
  }
}

TEST_CASE("run_clt theory and null standardizations") {
  CltConfig cfg = small_clt(0.0);
  cfg.standardize = Standardization::NullSigma;
  const CltResult null = run_clt(cfg);
  const CovarianceBlocks sigma = source_blocks(cfg.source);
  CHECK(null.center == 0.0);
  CHECK(fixtures::rel_close(null.scale, null_sd(sigma, 40), 1e-15));

  cfg.standardize = Standardization::TheorySigma;
  const CltResult theory = run_clt(cfg);
  CHECK(fixtures::rel_close(theory.scale, std::sqrt(sigma_bar_sq(sigma, 40).total), 1e-15));
  CHECK(theory.statistics == null.statistics);

  cfg.center = Centering::EmpiricalMean;
  CHECK(run_clt(cfg).center == mean_of(theory.statistics));
}

TEST_CASE("run_clt with a Gaussian source and kernel") {
  RngStream rng(83, 0);
  CltConfig cfg;
  cfg.source = GaussianSource{fixtures::random_blocks(6, 5, rng), 30};
  cfg.kernels = {KernelSpec::gaussian(), KernelSpec::gaussian()};
  cfg.bandwidths = {RhoTarget{1.0}, RhoTarget{1.0}};
  cfg.reps = 20;
  cfg.standardize = Standardization::TheorySigma;
  const CltResult r = run_clt(cfg);
  CHECK(r.standardized.size() == 20);
  for (double z : r.standardized) CHECK(std::isfinite(z));
}

TEST_CASE("run_clt is independent of the thread count") {
  CltConfig cfg = small_clt(0.1);
  cfg.kernels = {KernelSpec::laplace(), KernelSpec::laplace()};
  cfg.bandwidths = {MedianHeuristic{}, MedianHeuristic{}};
  const CltResult one = run_clt(cfg);
  cfg.threads = 4;
  const CltResult four = run_clt(cfg);
  CHECK(one.statistics == four.statistics);
  CHECK(one.standardized == four.standardized);
  CHECK(one.ks_distance == four.ks_distance);
}

TEST_CASE("run_clt with a reused stream") {
  CltConfig cfg = small_clt(0.1);
  cfg.reps = 2;
  cfg.reuse_stream = true;
  cfg.standardize = Standardization::TheorySigma;
  const CltResult r = run_clt(cfg);
  CHECK(r.statistics[0] == r.statistics[1]);
  CHECK(r.standardized[0] == r.standardized[1]);
  CHECK(r.ks_distance == ks_distance(r.standardized));

  // Zero spread cannot be standardized empirically.
  cfg.standardize = Standardization::EmpiricalSigma;
  CHECK_THROWS_AS(run_clt(cfg), DegenerateSample);
}

TEST_CASE("run_clt validation and error context") {
  CltConfig cfg = small_clt(0.1);
  cfg.reps = 1;
  CHECK_THROWS_AS(run_clt(cfg), InvalidArgument);
  cfg = small_clt(0.1);
  cfg.source = SimScenario{3, 4, 0.1};
  CHECK_THROWS_AS(run_clt(cfg), SampleTooSmall);

  cfg = small_clt(0.1);
  const KernelSpec flat = KernelSpec::custom("flat", [](double) { return 1.0; }, [](double) { return 0.0; });
  cfg.kernels = {flat, flat};
  try {
    run_clt(cfg);
    FAIL("expected a replication error");
  } catch (const ReplicationError& e) {
    CHECK(e.replication() == 0);
  }
}

TEST_CASE("run_power structure and determinism") {
  PowerConfig cfg;
  cfg.base = SimScenario{30, 8, 0.0, NoiseDist::StdNormal};
  cfg.rho_grid = {0.0, 0.2, 0.5};
  cfg.kernels = {KernelSpec::identity(), KernelSpec::gaussian(), KernelSpec::laplace()};
  cfg.bandwidths = {RhoTarget{1.0}, MedianHeuristic{}};
  cfg.reps = 40;
  cfg.seed = 5;
  const PowerResult r = run_power(cfg);
  REQUIRE(r.rows.size() == (1 + 2 * 2) * 3);
  CHECK(r.rows[0].kernel == "identity");
  CHECK(r.rows[0].bandwidth == "fixed:1");
  CHECK(r.rows[3].kernel == "gaussian");
  CHECK(r.rows[3].bandwidth == "rho:1");
  CHECK(r.rows[6].bandwidth == "median");
  CHECK(r.rows[14].kernel == "laplace");
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const PowerRow& row = r.rows[i];
    CHECK(row.rho == cfg.rho_grid[i % 3]);
    CHECK(row.empirical_power >= 0.0);
    CHECK(row.empirical_power <= 1.0);
    CHECK(row.std_err == std::sqrt(row.empirical_power * (1.0 - row.empirical_power) / 40.0));
    const SimScenario scn{30, 8, row.rho, NoiseDist::StdNormal};
    CHECK(row.theoretical_power == theoretical_power(implied_blocks(scn), 30, 0.05));
  }

  cfg.threads = 4;
  const PowerResult r4 = run_power(cfg);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].empirical_power == r4.rows[i].empirical_power);
}

TEST_CASE("run_power replicates dcor_test on the shared streams") {
  PowerConfig cfg;
  cfg.base = SimScenario{25, 5, 0.0, NoiseDist::UniformSqrt3};
  cfg.rho_grid = {0.0, 0.4};
  cfg.reps = 30;
  cfg.seed = 11;
  const PowerResult r = run_power(cfg);
  for (std::size_t cell = 0; cell < 2; ++cell) {
    std::size_t count = 0;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      RngStream rng = derive_stream(cfg.seed, (static_cast<std::uint64_t>(cell) << 32) | rep);
      const SimScenario scn{25, 5, cfg.rho_grid[cell], NoiseDist::UniformSqrt3};
      TestOptions o;
      const double tau = std::sqrt(10.0);
      o.tau = {PopulationTau{tau}, PopulationTau{tau}};
      count += dcor_test(sample_factor(scn, rng), o).reject ? 1 : 0;
    }
    CHECK(r.rows[cell].empirical_power == static_cast<double>(count) / 30.0);
  }
}

TEST_CASE("run_power is monotone in rho") {
  PowerConfig cfg;
  cfg.base = SimScenario{60, 10, 0.0, NoiseDist::StdNormal};
  cfg.rho_grid = {0.0, 0.1, 0.2, 0.3, 0.5};
  cfg.reps = 200;
  cfg.seed = 3;
  const PowerResult r = run_power(cfg);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const double slack = 2.0 * std::max(r.rows[i].std_err, r.rows[i - 1].std_err);
    CHECK(r.rows[i].empirical_power + slack >= r.rows[i - 1].empirical_power);
  }
  CHECK(std::abs(r.rows[0].empirical_power - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / 200.0));
  CHECK(r.rows.back().empirical_power >= 0.99);
}

TEST_CASE("run_power validation") {
  PowerConfig cfg;
  cfg.base = SimScenario{20, 4, 0.0};
  cfg.reps = 5;
  CHECK_THROWS_AS(run_power(cfg), InvalidArgument);
  cfg.rho_grid = {0.1, 1.0};
  CHECK_THROWS_AS(run_power(cfg), InvalidArgument);
  cfg.rho_grid = {0.1};
  cfg.kernels = {KernelSpec::gaussian()};
  cfg.bandwidths.clear();
  CHECK_THROWS_AS(run_power(cfg), InvalidArgument);
  cfg.kernels = {KernelSpec::identity()};
  CHECK_NOTHROW(run_power(cfg));
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(run_power(cfg), InvalidArgument);
  cfg.alpha = 0.05;
  cfg.base.n = 3;
  CHECK_THROWS_AS(run_power(cfg), SampleTooSmall);
}
