#include "hsdcov/cli.hpp"

#include <filesystem>
#include <functional>

#include "cli_support.hpp"
#include "hsdcov/eigencheck.hpp"
#include "hsdcov/errors.hpp"
#include "hsdcov/experiments.hpp"
#include "hsdcov/testkit.hpp"
#include "hsdcov/theory.hpp"

namespace hsdcov {

namespace {

using nlohmann::json;
using namespace cli;

std::string text(const json& cfg, const std::string& key) { return required(cfg, key).get<std::string>(); }
double real(const json& cfg, const std::string& key) { return required(cfg, key).get<double>(); }
std::uint64_t count(const json& cfg, const std::string& key) { return required(cfg, key).get<std::uint64_t>(); }
std::size_t size(const json& cfg, const std::string& key) { return static_cast<std::size_t>(count(cfg, key)); }

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
}

/// Where the JSON summary of a CSV-producing command goes: --summary when
/// given, else next to the CSV file, else standard error.
std::string summary_path(const std::string& out, const std::string& summary) {
  if (!summary.empty()) return summary;
  if (out == "-") return "-";
  std::filesystem::path p(out);
  if (p.extension() == ".json") return out + ".json";
  return p.replace_extension(".json").string();
}

struct CsvOutputs {
  std::string out = "-";
  std::string summary;
  unsigned threads = 1;
};

void add_csv_outputs(CLI::App* app, CsvOutputs& o) {
  app->add_option("--out", o.out, "CSV output file, - for standard output");
  app->add_option("--summary", o.summary,
                  "JSON summary file (default: the CSV path with a .json extension, or standard error)");
  app->add_option("--threads", o.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

void emit(const CsvOutputs& o, const std::function<void(std::ostream&)>& write_csv, const json& summary,
          std::ostream& out, std::ostream& err) {
  OutputTarget csv(o.out, out);
  write_csv(csv.stream());
  OutputTarget js(summary_path(o.out, o.summary), err);
  write_json(js.stream(), summary);
}

// ---- test -----------------------------------------------------------------

std::vector<OptSpec> test_specs() {
  return {{"x", Kind::Text, nullptr, "CSV file of X observations, one row per observation (required)"},
          {"y", Kind::Text, nullptr, "CSV file of Y observations, aligned with --x (required)"},
          {"header", Kind::Flag, false, "Skip the first line of both CSV files"},
          {"alpha", Kind::Real, 0.05, "Significance level"},
          {"kernel", Kind::Text, "identity", "identity, gaussian or laplace"},
          {"bandwidth", Kind::Text, "fixed:1", "fixed:<gamma>, median or rho:<target> (tau estimated)"}};
}

int cmd_test(const json& cfg, std::ostream& out) {
  const std::string xpath = text(cfg, "x");
  const std::string ypath = text(cfg, "y");
  const bool header = cfg.at("header").get<bool>();
  const double alpha = real(cfg, "alpha");
  check_alpha(alpha);
  TestOptions opts;
  opts.alpha = alpha;
  const KernelSpec k = kernel_from_name(text(cfg, "kernel"));
  const BandwidthSpec b = parse_bandwidth(text(cfg, "bandwidth"));
  opts.kernels = {k, k};
  opts.bandwidths = {b, b};

  const DenseMatrix x = read_csv_matrix(xpath, header);
  const DenseMatrix y = read_csv_matrix(ypath, header);
  const std::size_t offset = header ? 2 : 1;
  if (x.rows() != y.rows()) {
    const bool x_longer = x.rows() > y.rows();
    const std::size_t row = std::min(x.rows(), y.rows()) + offset;
    throw DomainError((x_longer ? xpath : ypath) + ":" + std::to_string(row) + ": row has no partner in " +
                      (x_longer ? ypath : xpath) + " (" + std::to_string(x.rows()) + " vs " +
                      std::to_string(y.rows()) + " observations)");
  }
  if (x.rows() < 4) {
    throw DomainError(xpath + ": " + std::to_string(x.rows()) + " observations, at least 4 are needed");
  }

  const TestResult r = dcor_test(PairedSample(x, y), opts);
  json j;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  j["degenerate"] = r.degenerate;
  j["kernel"] = r.kernel_label;
  j["bandwidth"] = to_string(b);
  j["bandwidth_used"] = {{"x", r.bandwidth_used.x}, {"y", r.bandwidth_used.y}};
  j["n"] = x.rows();
  j["p"] = x.cols();
  j["q"] = y.cols();
  j["config"] = cfg;
  write_json(out, j);
  return 0;
}

// ---- clt ------------------------------------------------------------------

std::vector<OptSpec> scenario_specs() {
  return {{"n", Kind::Count, 200, "Sample size"},
          {"p", Kind::Count, 50, "Dimension of X and of Y"},
          {"dist", Kind::Text, "normal", "Noise distribution: normal, uniform or t4"}};
}

std::vector<OptSpec> clt_specs() {
  std::vector<OptSpec> s = scenario_specs();
  s.insert(s.end(),
           {{"rho", Kind::Real, 0.0, "Dependence parameter in [0, 1)"},
            {"kernel", Kind::Text, "identity", "identity, gaussian or laplace"},
            {"bandwidth", Kind::Text, "fixed:1", "fixed:<gamma>, median or rho:<target> (population tau)"},
            {"reps", Kind::Count, 200, "Monte-Carlo replications"},
            {"seed", Kind::Seed, 0, "Master seed (HSDCOV_SEED sets the default)"},
            {"standardize", Kind::Text, "empirical", "theory, null or empirical"},
            {"center", Kind::Text, "theory", "theory or empirical; ignored by --standardize empirical"},
            {"reuse-stream", Kind::Flag, false, "Draw every replication from stream 0 (diagnostic)"}});
  return s;
}

SimScenario scenario_of(const json& cfg, double rho) {
  const SimScenario scn{size(cfg, "n"), size(cfg, "p"), rho, noise_from_name(text(cfg, "dist"))};
  scn.validate();
  return scn;
}

int cmd_clt(const json& cfg, const CsvOutputs& o, const std::string& stats_path, std::ostream& out,
            std::ostream& err) {
  CltConfig c;
  c.source = scenario_of(cfg, real(cfg, "rho"));
  const KernelSpec k = kernel_from_name(text(cfg, "kernel"));
  const BandwidthSpec b = parse_bandwidth(text(cfg, "bandwidth"));
  c.kernels = {k, k};
  c.bandwidths = {b, b};
  c.reps = size(cfg, "reps");
  c.seed = count(cfg, "seed");
  c.standardize = standardization_from_name(text(cfg, "standardize"));
  c.center = centering_from_name(text(cfg, "center"));
  c.reuse_stream = cfg.at("reuse-stream").get<bool>();
  c.threads = o.threads;

  const CltResult r = run_clt(c);
  if (!stats_path.empty()) {
    OutputTarget stats(stats_path, out);
    stats.stream() << "replication,statistic,standardized\n";
    for (std::size_t i = 0; i < r.statistics.size(); ++i)
      stats.stream() << i << ',' << format_real(r.statistics[i]) << ',' << format_real(r.standardized[i]) << '\n';
  }
  json summary;
  summary["ks_distance"] = r.ks_distance;
  summary["center"] = r.center;
  summary["scale"] = r.scale;
  summary["config"] = cfg;
  emit(
      o,
      [&](std::ostream& os) {
        os << "prob,normal_quantile,sample_quantile\n";
        for (std::size_t i = 0; i < r.probs.size(); ++i) {
          os << format_real(r.probs[i]) << ',' << format_real(r.normal_quantiles[i]) << ','
             << format_real(r.sample_quantiles[i]) << '\n';
        }
      },
      summary, out, err);
  return 0;
}

// ---- power ----------------------------------------------------------------

std::vector<OptSpec> power_specs() {
  std::vector<OptSpec> s = scenario_specs();
  s.insert(s.end(),
           {{"rho-grid", Kind::RealList, json::array({0.0}), "Comma-separated dependence parameters"},
            {"kernels", Kind::TextList, json::array({"identity"}), "Comma-separated kernels"},
            {"bandwidths", Kind::TextList, json::array({"fixed:1"}),
             "Comma-separated bandwidth specs for the non-identity kernels"},
            {"alpha", Kind::Real, 0.05, "Significance level"},
            {"reps", Kind::Count, 500, "Monte-Carlo replications per cell"},
            {"seed", Kind::Seed, 0, "Master seed (HSDCOV_SEED sets the default)"}});
  return s;
}

int cmd_power(const json& cfg, const CsvOutputs& o, std::ostream& out, std::ostream& err) {
  PowerConfig c;
  c.base = scenario_of(cfg, 0.0);
  c.rho_grid = required(cfg, "rho-grid").get<std::vector<double>>();
  c.kernels.clear();
  for (const std::string& name : required(cfg, "kernels").get<std::vector<std::string>>())
    c.kernels.push_back(kernel_from_name(name));
  c.bandwidths.clear();
  for (const std::string& spec : required(cfg, "bandwidths").get<std::vector<std::string>>())
    c.bandwidths.push_back(parse_bandwidth(spec));
  c.alpha = real(cfg, "alpha");
  check_alpha(c.alpha);
  c.reps = size(cfg, "reps");
  c.seed = count(cfg, "seed");
  c.threads = o.threads;

  const PowerResult r = run_power(c);
  json summary;
  summary["rows"] = r.rows.size();
  summary["config"] = cfg;
  emit(
      o,
      [&](std::ostream& os) {
        os << "kernel,bandwidth,rho,empirical_power,theoretical_power,std_err\n";
        for (const PowerRow& row : r.rows) {
          os << row.kernel << ',' << row.bandwidth << ',' << format_real(row.rho) << ','
             << format_real(row.empirical_power) << ',' << format_real(row.theoretical_power) << ','
             << format_real(row.std_err) << '\n';
        }
      },
      summary, out, err);
  return 0;
}

// ---- theory ---------------------------------------------------------------

std::vector<OptSpec> theory_specs() {
  return {{"n", Kind::Count, nullptr, "Sample size (required)"},
          {"alpha", Kind::Real, 0.05, "Significance level for the power"},
          {"p", Kind::Count, nullptr, "Identity-block shorthand: dimension of X (or give the three --sigma-* files)"},
          {"q", Kind::Count, nullptr, "Identity-block shorthand: dimension of Y (defaults to p)"},
          {"rho-xy", Kind::Real, 0.0, "Identity-block shorthand: Sigma_XY = rho-xy I"},
          {"sigma-x", Kind::Text, nullptr, "CSV file with Sigma_X"},
          {"sigma-y", Kind::Text, nullptr, "CSV file with Sigma_Y"},
          {"sigma-xy", Kind::Text, nullptr, "CSV file with Sigma_XY"},
          {"header", Kind::Flag, false, "Skip the first line of the covariance CSV files"}};
}

SymmetricMatrix symmetric_from(const std::string& path, bool header) {
  try {
    return SymmetricMatrix(read_csv_matrix(path, header));
  } catch (const InvalidArgument& e) {
    throw DomainError(path + ": " + e.what());
  } catch (const DimensionMismatch& e) {
    throw DomainError(path + ": " + e.what());
  }
}

CovarianceBlocks theory_blocks(const json& cfg) {
  const bool files = !cfg.at("sigma-x").is_null() || !cfg.at("sigma-y").is_null() || !cfg.at("sigma-xy").is_null();
  if (files) {
    if (!cfg.at("p").is_null() || !cfg.at("q").is_null())
      throw UsageError("give either --p/--q/--rho-xy or the --sigma-* files, not both");
    const bool header = cfg.at("header").get<bool>();
    const SymmetricMatrix sx = symmetric_from(text(cfg, "sigma-x"), header);
    const SymmetricMatrix sy = symmetric_from(text(cfg, "sigma-y"), header);
    const DenseMatrix sxy = read_csv_matrix(text(cfg, "sigma-xy"), header);
    return CovarianceBlocks(sx, sy, sxy);
  }
  const std::size_t p = size(cfg, "p");
  const std::size_t q = cfg.at("q").is_null() ? p : size(cfg, "q");
  if (p == 0 || q == 0) throw UsageError("--p and --q must be positive");
  return CovarianceBlocks::identity_blocks(p, q, real(cfg, "rho-xy"));
}

int cmd_theory(const json& cfg, std::ostream& out) {
  const std::size_t n = size(cfg, "n");
  const double alpha = real(cfg, "alpha");
  check_alpha(alpha);
  const CovarianceBlocks sigma = theory_blocks(cfg);
  TheoryReport r;
  try {
    r = theory_report(sigma, n, alpha);
  } catch (const InvalidArgument& e) {
    // Zero traces or zero Frobenius norms: a valid PSD input outside the
    // statistics' domain.
    throw DomainError(e.what());
  }
  json j;
  j["tau_X_sq"] = r.tau_X_sq;
  j["tau_Y_sq"] = r.tau_Y_sq;
  j["mean"] = r.mean;
  j["sigma1_sq"] = r.sigma1_sq;
  j["sigma2_sq"] = r.sigma2_sq;
  j["sigma_sq"] = r.sigma_sq;
  j["A"] = r.A;
  j["power"] = r.power;
  j["warnings"] = r.warnings;
  j["config"] = cfg;
  write_json(out, j);
  return 0;
}

// ---- eigencheck -----------------------------------------------------------

std::vector<OptSpec> eigencheck_specs() {
  return {{"p", Kind::Count, 6, "Length of the u sign vectors"},
          {"q", Kind::Count, 6, "Length of the v sign vectors"},
          {"a", Kind::Real, nullptr, "Perturbation size, |a| p q < 1 (required)"},
          {"seed", Kind::Seed, 0, "Seed for the random sign vectors (HSDCOV_SEED sets the default)"},
          {"signs", Kind::Text, nullptr, "CSV with four rows u1, u2, v1, v2 of +-1 entries; overrides --p/--q/--seed"},
          {"aligned", Kind::Flag, false, "Use u2 = u1 and v2 = v1"}};
}

int cmd_eigencheck(const json& cfg, std::ostream& out) {
  const double a = real(cfg, "a");
  SignDraw draw;
  if (!cfg.at("signs").is_null()) {
    const std::string path = text(cfg, "signs");
    const auto rows = read_csv_int_rows(path);
    if (rows.size() != 4) throw UsageError(path + ": expected 4 rows (u1, u2, v1, v2), found " + std::to_string(rows.size()));
    draw = {rows[0], rows[1], rows[2], rows[3]};
  } else {
    RngStream rng = derive_stream(count(cfg, "seed"), 0);
    draw = random_sign_draw(size(cfg, "p"), size(cfg, "q"), rng);
  }
  if (cfg.at("aligned").get<bool>()) {
    draw.u2 = draw.u1;
    draw.v2 = draw.v1;
  }
  const EigenCheckReport r = minimax_eigencheck(draw, a);
  json j;
  j["max_identity_error"] = r.max_identity_error;
  j["nontrivial_eigencount"] = r.nontrivial_eigencount;
  j["lambda_values"] = r.lambda_values;
  j["closed_form_lambdas"] = r.closed_form_lambdas;
  j["identity_value"] = r.identity_value;
  j["config"] = cfg;
  write_json(out, j);
  return 0;
}

int usage_failure(const std::string& message, const CLI::App& app, std::ostream& err) {
  const auto subs = app.get_subcommands();
  err << "error: " << message << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("High-dimensional (kernel) distance covariance: tests, theory and simulations", "hsdcov");
  app.require_subcommand(1);

  CLI::App* test = app.add_subcommand("test", "Distance correlation test of independence on two CSV files");
  CLI::App* clt = app.add_subcommand("clt", "Monte-Carlo check of the normal approximation (QQ data)");
  CLI::App* power = app.add_subcommand("power", "Monte-Carlo power against the theoretical power curve");
  CLI::App* theory = app.add_subcommand("theory", "Closed-form Gaussian population quantities");
  CLI::App* eigen = app.add_subcommand("eigencheck", "Four-eigenvalue identity of the minimax perturbation");

  const OptionSet test_opts(test, test_specs());
  const OptionSet clt_opts(clt, clt_specs());
  const OptionSet power_opts(power, power_specs());
  const OptionSet theory_opts(theory, theory_specs());
  const OptionSet eigen_opts(eigen, eigencheck_specs());
  CsvOutputs clt_out, power_out;
  add_csv_outputs(clt, clt_out);
  add_csv_outputs(power, power_out);
  std::string stats_path;
  clt->add_option("--stats", stats_path, "Optional CSV of per-replication statistics");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return usage_failure(e.what(), app, err);
  }

  try {
    if (test->parsed()) return cmd_test(test_opts.resolve("test"), out);
    if (clt->parsed()) return cmd_clt(clt_opts.resolve("clt"), clt_out, stats_path, out, err);
    if (power->parsed()) return cmd_power(power_opts.resolve("power"), power_out, out, err);
    if (theory->parsed()) return cmd_theory(theory_opts.resolve("theory"), out);
    if (eigen->parsed()) return cmd_eigencheck(eigen_opts.resolve("eigencheck"), out);
  } catch (const UsageError& e) {
    return usage_failure(e.what(), app, err);
  } catch (const InvalidArgument& e) {
    return usage_failure(e.what(), app, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const SampleTooSmall& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InvalidConstruction& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return usage_failure("no subcommand given", app, err);
}

}  // namespace hsdcov
