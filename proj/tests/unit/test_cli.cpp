#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsdcov/cli.hpp"
#include "hsdcov/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = hsdcov::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("hsdcov_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string file(const std::string& name, const std::string& contents = {}) const {
    const fs::path p = path_ / name;
    if (!contents.empty()) std::ofstream(p, std::ios::binary) << contents;
    return p.string();
  }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::string kSample =
    "0.1,2.0\n1.5,-0.3\n-0.7,0.9\n2.2,1.1\n-1.0,-2.5\n0.4,0.0\n";

}  // namespace

TEST_CASE("cli test on identical files rejects") {
  TempDir dir;
  const std::string x = dir.file("x.csv", kSample);
  const Run r = run({"test", "--x", x, "--y", x});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["reject"] == true);
  CHECK(j["statistic"].get<double>() == Catch::Approx(6.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(j["n"] == 6);
  CHECK(j["kernel"] == "identity");
  CHECK(j["bandwidth"] == "fixed:1");
  CHECK(j["config"]["x"] == x);
}

TEST_CASE("cli test with a constant Y reports degeneracy") {
  TempDir dir;
  const std::string x = dir.file("x.csv", kSample);
  const std::string y = dir.file("y.csv", "3\n3\n3\n3\n3\n3\n");
  const Run r = run({"test", "--x", x, "--y", y, "--kernel", "gaussian", "--bandwidth", "median"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["reject"] == false);
  CHECK(j["degenerate"] == true);
  CHECK(j["p_value"] == 1.0);
}

TEST_CASE("cli test input errors") {
  TempDir dir;
  const std::string x = dir.file("x.csv", kSample);

  const Run ragged = run({"test", "--x", dir.file("r.csv", "1,2\n3\n4,5\n6,7\n"), "--y", x});
  CHECK(ragged.code == 2);
  CHECK(ragged.err.find("r.csv:2") != std::string::npos);

  const Run text = run({"test", "--x", dir.file("t.csv", "1,2\n3,abc\n4,5\n6,7\n"), "--y", x});
  CHECK(text.code == 2);
  CHECK(text.err.find("t.csv:2") != std::string::npos);

  const Run hole = run({"test", "--x", dir.file("h.csv", "1,2\n\n4,5\n6,7\n"), "--y", x});
  CHECK(hole.code == 2);

  const Run short_y = run({"test", "--x", x, "--y", dir.file("s.csv", "1\n2\n3\n4\n5\n")});
  CHECK(short_y.code == 3);
  CHECK(short_y.err.find("x.csv:6") != std::string::npos);

  const std::string tiny = dir.file("tiny.csv", "1\n2\n3\n");
  const Run small = run({"test", "--x", tiny, "--y", tiny});
  CHECK(small.code == 3);
  CHECK(small.err.find("tiny.csv") != std::string::npos);

  CHECK(run({"test", "--x", x}).code == 2);
  CHECK(run({"test", "--x", x, "--y", dir.file("missing.csv")}).code == 2);
  CHECK(run({"test", "--x", x, "--y", x, "--alpha", "1.5"}).code == 2);
  CHECK(run({"test", "--x", x, "--y", x, "--kernel", "cosine"}).code == 2);
  CHECK(run({"test", "--x", x, "--y", x, "--bandwidth", "wide"}).code == 2);
}

TEST_CASE("cli test honours a header line and CRLF endings") {
  TempDir dir;
  const std::string plain = dir.file("p.csv", kSample);
  std::string crlf = "a,b\r\n";
  for (char c : kSample) crlf += c == '\n' ? std::string("\r\n") : std::string(1, c);
  const std::string headed = dir.file("h.csv", crlf + "\r\n");
  const Run a = run({"test", "--x", plain, "--y", plain});
  const Run b = run({"test", "--x", headed, "--y", headed, "--header"});
  REQUIRE(b.code == 0);
  CHECK(json::parse(a.out)["statistic"] == json::parse(b.out)["statistic"]);
}

TEST_CASE("cli clt writes QQ data and a summary") {
  TempDir dir;
  const std::string csv = dir.file("clt.csv");
  const Run r = run({"clt", "--n", "30", "--p", "5", "--rho", "0.1", "--reps", "25", "--seed", "4", "--out", csv});
  REQUIRE(r.code == 0);
  const std::string body = slurp(csv);
  CHECK(body.rfind("prob,normal_quantile,sample_quantile\n", 0) == 0);
  CHECK(line_count(body) == 100);
  CHECK(body.find("\n0.5,0,") != std::string::npos);

  const json summary = json::parse(slurp(dir.file("clt.json")));
  CHECK(summary["ks_distance"].get<double>() > 0.0);
  CHECK(summary["config"]["seed"] == 4);
  CHECK(summary["config"]["command"] == "clt");
  CHECK_FALSE(summary["config"].contains("threads"));
}

TEST_CASE("cli clt is byte-identical across runs and thread counts") {
  TempDir dir;
  const std::vector<std::string> base{"clt", "--n", "24", "--p", "6", "--rho", "0.2", "--reps", "30",
                                      "--kernel", "gaussian", "--bandwidth", "rho:1.4142135623730951"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  REQUIRE(run(with({"--out", dir.file("a.csv"), "--stats", dir.file("a_stats.csv")})).code == 0);
  REQUIRE(run(with({"--out", dir.file("b.csv"), "--stats", dir.file("b_stats.csv")})).code == 0);
  REQUIRE(run(with({"--out", dir.file("c.csv"), "--stats", dir.file("c_stats.csv"), "--threads", "4"})).code == 0);
  for (const char* name : {"b", "c"}) {
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file(std::string(name) + ".csv")));
    CHECK(slurp(dir.file("a.json")) == slurp(dir.file(std::string(name) + ".json")));
    CHECK(slurp(dir.file("a_stats.csv")) == slurp(dir.file(std::string(name) + "_stats.csv")));
  }
  CHECK(line_count(slurp(dir.file("a_stats.csv"))) == 31);

  // Re-running from the embedded config reproduces the output.
  REQUIRE(run({"clt", "--config", dir.file("a.json"), "--out", dir.file("d.csv")}).code == 0);
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("d.csv")));
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("d.json")));
}

TEST_CASE("cli clt with two replications") {
  const Run r = run({"clt", "--n", "10", "--p", "3", "--reps", "2"});
  REQUIRE(r.code == 0);
  CHECK(line_count(r.out) == 100);
  CHECK(json::parse(r.err)["config"]["reps"] == 2);
}

TEST_CASE("cli clt flag errors print usage") {
  for (const std::vector<std::string>& args :
       std::vector<std::vector<std::string>>{{"clt", "--n", "ten"},
                                             {"clt", "--rho", "1.5"},
                                             {"clt", "--dist", "cauchy"},
                                             {"clt", "--standardize", "robust"},
                                             {"clt", "--threads", "0"},
                                             {"clt", "--bogus", "1"},
                                             {"clt", "--seed", "-3"},
                                             {"frobnicate"},
                                             {}}) {
    const Run r = run(args);
    INFO(r.err);
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
  CHECK(run({"clt", "--n", "3", "--reps", "2"}).code == 3);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli power table") {
  const Run r = run({"power", "--n", "20", "--p", "4", "--rho-grid", "0", "--reps", "20"});
  REQUIRE(r.code == 0);
  CHECK(line_count(r.out) == 2);
  CHECK(r.out.rfind("kernel,bandwidth,rho,empirical_power,theoretical_power,std_err\nidentity,fixed:1,0,", 0) == 0);

  const Run grid = run({"power", "--n", "20", "--p", "4", "--rho-grid", "0,0.3,0.6", "--kernels", "identity,laplace",
                        "--bandwidths", "rho:1,median", "--reps", "20"});
  REQUIRE(grid.code == 0);
  CHECK(line_count(grid.out) == 1 + 3 * 3);
  const json summary = json::parse(grid.err);
  CHECK(summary["rows"] == 9);
  CHECK(summary["config"]["kernels"] == json::array({"identity", "laplace"}));
  CHECK(run({"power", "--rho-grid", "0,x"}).code == 2);
  CHECK(run({"power", "--kernels", "gaussian,"}).code == 2);
}

TEST_CASE("cli power is byte-identical across thread counts") {
  const std::vector<std::string> args{"power", "--n", "20", "--p", "5", "--rho-grid", "0,0.4", "--kernels",
                                      "identity,gaussian", "--bandwidths", "rho:1", "--reps", "40", "--seed", "8"};
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--threads", "4"});
  const Run a = run(args);
  const Run b = run(threaded);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.err == b.err);
}

TEST_CASE("cli config files and seed resolution") {
  TempDir dir;
  const std::string cfg = dir.file("cfg.json", R"({"n": 20, "p": 4, "rho-grid": [0.2], "reps": 10, "seed": 77})");
  const Run from_file = run({"power", "--config", cfg});
  REQUIRE(from_file.code == 0);
  CHECK(json::parse(from_file.err)["config"]["seed"] == 77);

  const Run overridden = run({"power", "--config", cfg, "--seed", "5"});
  REQUIRE(overridden.code == 0);
  CHECK(json::parse(overridden.err)["config"]["seed"] == 5);
  CHECK(json::parse(overridden.err)["config"]["n"] == 20);

  ::setenv("HSDCOV_SEED", "123", 1);
  const Run env = run({"power", "--n", "20", "--p", "4", "--reps", "5"});
  const Run env_file = run({"power", "--config", cfg});
  ::setenv("HSDCOV_SEED", "abc", 1);
  const Run bad_env = run({"power", "--n", "20", "--p", "4", "--reps", "5"});
  ::unsetenv("HSDCOV_SEED");
  REQUIRE(env.code == 0);
  CHECK(json::parse(env.err)["config"]["seed"] == 123);
  CHECK(json::parse(env_file.err)["config"]["seed"] == 77);
  CHECK(bad_env.code == 2);

  CHECK(run({"power", "--config", dir.file("u.json", R"({"nn": 20})")}).code == 2);
  CHECK(run({"power", "--config", dir.file("t.json", R"({"n": "twenty"})")}).code == 2);
  CHECK(run({"power", "--config", dir.file("c.json", R"({"command": "clt"})")}).code == 2);
  CHECK(run({"power", "--config", dir.file("m.json", "{not json")}).code == 2);
  CHECK(run({"power", "--config", dir.file("absent.json")}).code == 2);
}

TEST_CASE("cli theory") {
  const Run null = run({"theory", "--p", "100", "--q", "100", "--rho-xy", "0", "--n", "200"});
  REQUIRE(null.code == 0);
  const json j = json::parse(null.out);
  CHECK(j["sigma_sq"].get<double>() == Catch::Approx(1.0 / (2.0 * 200 * 199)).epsilon(1e-12));
  CHECK(j["sigma1_sq"] == 0.0);
  CHECK(j["warnings"].empty());

  const Run a10 = run({"theory", "--p", "100", "--rho-xy", "0.1", "--n", "1000"});
  REQUIRE(a10.code == 0);
  CHECK(json::parse(a10.out)["A"].get<double>() == Catch::Approx(10.0).epsilon(1e-12));
  CHECK(run({"theory", "--p", "10"}).code == 2);
}

TEST_CASE("cli theory with covariance files") {
  TempDir dir;
  const std::string sx = dir.file("sx.csv", "2,0.5\n0.5,1\n");
  const std::string sy = dir.file("sy.csv", "1\n");
  const std::string sxy = dir.file("sxy.csv", "0.3\n0.2\n");
  const Run ok = run({"theory", "--sigma-x", sx, "--sigma-y", sy, "--sigma-xy", sxy, "--n", "50"});
  REQUIRE(ok.code == 0);
  const hsdcov::CovarianceBlocks blocks(hsdcov::SymmetricMatrix(hsdcov::DenseMatrix::from_rows({{2, 0.5}, {0.5, 1}})),
                                        hsdcov::SymmetricMatrix::identity(1),
                                        hsdcov::DenseMatrix::from_rows({{0.3}, {0.2}}));
  CHECK(json::parse(ok.out)["sigma_sq"].get<double>() == hsdcov::sigma_bar_sq(blocks, 50).total);

  const std::string big_xy = dir.file("big.csv", "1.5\n0.2\n");
  CHECK(run({"theory", "--sigma-x", sx, "--sigma-y", sy, "--sigma-xy", big_xy, "--n", "50"}).code == 3);
  const std::string asym = dir.file("asym.csv", "2,0.5\n0.1,1\n");
  CHECK(run({"theory", "--sigma-x", asym, "--sigma-y", sy, "--sigma-xy", sxy, "--n", "50"}).code == 3);
  const std::string wrong = dir.file("wrong.csv", "0.3,0.2\n");
  CHECK(run({"theory", "--sigma-x", sx, "--sigma-y", sy, "--sigma-xy", wrong, "--n", "50"}).code == 3);
  CHECK(run({"theory", "--sigma-x", sx, "--sigma-y", sy, "--sigma-xy", sxy, "--n", "1"}).code == 3);
  CHECK(run({"theory", "--sigma-x", sx, "--n", "50"}).code == 2);
  CHECK(run({"theory", "--sigma-x", sx, "--sigma-y", sy, "--sigma-xy", sxy, "--p", "2", "--n", "50"}).code == 2);
}

TEST_CASE("cli eigencheck") {
  const Run zero = run({"eigencheck", "--a", "0"});
  REQUIRE(zero.code == 0);
  CHECK(json::parse(zero.out)["max_identity_error"] == 0.0);

  const Run random = run({"eigencheck", "--p", "6", "--q", "6", "--a", std::to_string(1.0 / 144.0), "--seed", "9"});
  REQUIRE(random.code == 0);
  const json j = json::parse(random.out);
  CHECK(j["max_identity_error"].get<double>() <= 1e-8);
  CHECK(j["nontrivial_eigencount"].get<int>() <= 4);

  const Run aligned = run({"eigencheck", "--a", "0.005", "--aligned"});
  REQUIRE(aligned.code == 0);
  CHECK(json::parse(aligned.out)["identity_value"] == 1.0);

  CHECK(run({"eigencheck", "--p", "4", "--q", "4", "--a", "0.0625"}).code == 3);
  CHECK(run({"eigencheck", "--a", "-0.05"}).code == 3);
  CHECK(run({"eigencheck"}).code == 2);
}

TEST_CASE("cli eigencheck with a sign file") {
  TempDir dir;
  const Run ok = run({"eigencheck", "--a", "0.02", "--signs", dir.file("s.csv", "1,-1,1\n1,1,1\n-1,1\n1,1\n")});
  REQUIRE(ok.code == 0);
  CHECK(json::parse(ok.out)["max_identity_error"].get<double>() <= 1e-10);
  CHECK(run({"eigencheck", "--a", "0.02", "--signs", dir.file("b.csv", "1,-1,2\n1,1,1\n-1,1\n1,1\n")}).code == 2);
  CHECK(run({"eigencheck", "--a", "0.02", "--signs", dir.file("c.csv", "1,-1,1\n1,1,1\n-1,1\n")}).code == 2);
}
