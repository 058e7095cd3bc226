#include <gtest/gtest.h>

#include <sys/wait.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvsp/experiment.hpp"
#include "mvsp/simulator.hpp"
#include "mvsp/verification.hpp"

using namespace mvsp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = MVSP_CONFIG_DIR;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("mvsp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

fs::path write_config(const TempDir& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  json j;
  is >> j;
  return j;
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::string& cmd, const fs::path& cfg, CommandOptions opt = {}) {
  std::ostringstream log;
  return run_command(cmd, cfg, opt, log);
}

json ricker_config(const json& degree_list) {
  return {{"target", {{"builtin", "ricker2d"}, {"params", {{"sigma", 0.5}}}}},
          {"basis", "chebyshev"},
          {"degrees", 7},
          {"degree_list", degree_list},
          {"qubits", {4, 4}},
          {"dense_samples", 401}};
}

}  // namespace

TEST(Config, ParsesShippedConfigs) {
  const ExperimentConfig r = load_config(kConfigs / "ricker.json");
  EXPECT_EQ(r.target_name, "ricker2d");
  EXPECT_EQ(r.basis, Basis::chebyshev);
  EXPECT_EQ(r.degrees, (std::vector<int>{15, 15}));
  EXPECT_EQ(r.degree_list, (std::vector<int>{3, 7, 15, 31}));
  EXPECT_EQ(r.preprocessing, Preprocessing::interpolate);

  const ExperimentConfig g = load_config(kConfigs / "gaussian_correlated.json");
  EXPECT_EQ(g.preprocessing, Preprocessing::characteristic_function);
  EXPECT_EQ(g.qubits, (std::vector<int>{9, 9}));
  EXPECT_EQ(g.simulation.shots, 20000u);

  const ExperimentConfig c = load_config(kConfigs / "coulomb.json");
  EXPECT_EQ(c.basis, Basis::fourier);
  EXPECT_EQ(c.degrees, (std::vector<int>{4, 4, 4}));

  for (const char* name : {"student_t.json", "gaussian_uncorrelated.json"}) EXPECT_NO_THROW(load_config(kConfigs / name));
}

TEST(Config, RejectsInvalid) {
  const json base = ricker_config({3});
  json j = base;
  j["target"]["builtin"] = "banana";
  EXPECT_THROW(parse_config(j), std::invalid_argument);
  j = base;
  j["qubits"] = {4};
  EXPECT_THROW(parse_config(j), std::invalid_argument);
  j = base;
  j["preprocessing"] = "mirror_extend";
  EXPECT_THROW(parse_config(j), std::invalid_argument);
  j = base;
  j.erase("basis");
  EXPECT_THROW(parse_config(j), std::invalid_argument);
  j = base;
  j["target"] = {{"coefficients", "/nonexistent/coeffs.json"}};
  EXPECT_THROW(parse_config(j), std::invalid_argument);
}

TEST(Config, HashIsCanonical) {
  const json a = json::parse(R"({"x": 1, "y": [1, 2]})");
  const json b = json::parse(R"({"y": [1, 2], "x": 1})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(json::parse(R"({"x": 2, "y": [1, 2]})")));
}

TEST(Commands, ApproxConvergesMonotonically) {
  TempDir dir;
  const fs::path cfg = write_config(dir, "c.json", ricker_config({3, 7, 15, 31}));
  CommandOptions opt;
  opt.out_dir = dir / "out";
  ASSERT_EQ(run("approx", cfg, opt), 0);
  const json r = read_json(dir / "out/approx_report.json");
  const json& t = r["convergence"];
  ASSERT_EQ(t.size(), 4u);
  for (std::size_t i = 1; i < t.size(); ++i)
    EXPECT_LT(t[i]["max_dense_error"].get<double>(), t[i - 1]["max_dense_error"].get<double>());
  EXPECT_LT(t[3]["max_dense_error"].get<double>(), 1e-12);
  EXPECT_TRUE(fs::exists(dir / "out/convergence.csv"));
  const SeriesApprox s = series_from_json(read_json(dir / "out/coefficients.json"));
  EXPECT_EQ(s.degrees(), (std::vector<int>{7, 7}));
}

TEST(Commands, ApproxConstantIsExact) {
  TempDir dir;
  for (const char* basis : {"fourier", "chebyshev"}) {
    const json j = {{"target", {{"builtin", "constant"}, {"params", {{"value", 0.75}}}}},
                    {"basis", basis},
                    {"degrees", 2},
                    {"degree_list", {0, 1, 4}},
                    {"qubits", {3, 2}},
                    {"dense_samples", 101}};
    CommandOptions opt;
    opt.out_dir = dir / basis;
    ASSERT_EQ(run("approx", write_config(dir, std::string(basis) + ".json", j), opt), 0);
    const json r = read_json(dir / basis / "approx_report.json");
    for (const json& row : r["convergence"])
      EXPECT_LT(row["max_dense_error"].get<double>(), 1e-14) << basis;
  }
}

TEST(Commands, ApproxStudentTRatio) {
  TempDir dir;
  const json j = {{"target", {{"builtin", "student_t2d"}}},
                  {"basis", "fourier"},
                  {"degrees", 8},
                  {"degree_list", {8, 16}},
                  {"qubits", {4, 4}},
                  {"dense_samples", 1001}};
  CommandOptions opt;
  opt.out_dir = dir.path();
  ASSERT_EQ(run("approx", write_config(dir, "s.json", j), opt), 0);
  const json r = read_json(dir / "approx_report.json");
  const json& t = r["convergence"];
  const double ratio = t[0]["max_dense_error"].get<double>() / t[1]["max_dense_error"].get<double>();
  EXPECT_GE(ratio, 1.5);
  EXPECT_LE(ratio, 3.0);
}

TEST(Commands, SynthQubitCounts) {
  TempDir dir;
  struct Case {
    const char* basis;
    int degree, n, total;
  };
  for (const Case& c : {Case{"chebyshev", 63, 6, 30}, Case{"fourier", 63, 6, 26}}) {
    const json j = {{"target", {{"builtin", "ricker2d"}}},
                    {"basis", c.basis},
                    {"preprocessing", std::string(c.basis) == "fourier" ? "mirror_extend" : "interpolate"},
                    {"degrees", c.degree},
                    {"qubits", {c.n, c.n}}};
    CommandOptions opt;
    opt.out_dir = dir / c.basis;
    ASSERT_EQ(run("synth", write_config(dir, std::string(c.basis) + ".json", j), opt), 0);
    const json r = read_json(dir / c.basis / "resources.json");
    EXPECT_EQ(r["qubits"]["total"].get<int>(), c.total) << c.basis;
    EXPECT_EQ(r["circuit_qubits"].get<int>(), c.total);
    EXPECT_EQ(r["qubits"]["main"].get<int>(), 12);
    EXPECT_TRUE(fs::exists(dir / c.basis / "circuit.json"));
    EXPECT_TRUE(fs::exists(dir / c.basis / "circuit.txt"));
  }
}

TEST(Commands, SynthTrivialDegreeZero) {
  TempDir dir;
  const json j = {{"target", {{"builtin", "constant"}}}, {"basis", "fourier"}, {"degrees", 0}, {"qubits", {3}}};
  CommandOptions opt;
  opt.out_dir = dir.path();
  ASSERT_EQ(run("synth", write_config(dir, "c.json", j), opt), 0);
  const json r = read_json(dir / "resources.json");
  EXPECT_EQ(r["qubits"]["coeff_ancilla"].get<int>(), 0);
  EXPECT_EQ(r["qubits"]["total"].get<int>(), 3);
  EXPECT_EQ(r["gate_counts"]["cx_equivalent"].get<long long>(), 0);
  const Circuit c = circuit_from_json(read_json(dir / "circuit.json"));
  for (const Gate& g : c.gates()) EXPECT_EQ(g.kind, GateKind::hadamard);
}

TEST(Commands, SimulateMatchesSeries) {
  TempDir dir;
  const fs::path cfg = write_config(dir, "c.json", ricker_config({7}));
  CommandOptions opt;
  opt.out_dir = dir.path();
  ASSERT_EQ(run("simulate", cfg, opt), 0);
  const json r = read_json(dir / "report.json");
  EXPECT_LT(r["series_deviation"].get<double>(), 1e-10);
  EXPECT_NEAR(r["p_success"].get<double>(), r["p_success_analytic"].get<double>(), 1e-10);
  EXPECT_EQ(r["qubits"].get<int>(), 18);
  EXPECT_GT(r["fidelity"].get<double>(), 0.99);
  EXPECT_TRUE(fs::exists(dir / "amplitudes.csv"));
}

TEST(Commands, ExitCodes) {
  TempDir dir;
  json j = ricker_config({7});
  j["simulation"] = {{"shots", 0}};
  CommandOptions opt;
  opt.out_dir = dir.path();
  EXPECT_EQ(run("sample", write_config(dir, "zero.json", j), opt), 2);

  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(run("synth", dir / "broken.json", opt), 2);
  EXPECT_EQ(run("synth", dir / "missing.json", opt), 2);
  EXPECT_EQ(run("frobnicate", write_config(dir, "ok.json", ricker_config({7})), opt), 2);

  opt.qubit_cap = 10;
  EXPECT_EQ(run("simulate", dir / "ok.json", opt), 3);

  json off = ricker_config({7});
  off["simulation"] = {{"enabled", false}};
  EXPECT_EQ(run("simulate", write_config(dir, "off.json", off), CommandOptions{dir.path(), {}, {}}), 2);
}

TEST(Commands, SampleIsDeterministic) {
  TempDir dir;
  json j = ricker_config({7});
  j["simulation"] = {{"shots", 5000}, {"seed", 3}};
  const fs::path cfg = write_config(dir, "c.json", j);
  CommandOptions a{dir / "a", {}, {}}, b{dir / "b", {}, {}}, c{dir / "c", std::uint64_t{4}, {}};
  ASSERT_EQ(run("sample", cfg, a), 0);
  ASSERT_EQ(run("sample", cfg, b), 0);
  ASSERT_EQ(run("sample", cfg, c), 0);
  EXPECT_EQ(read_text(dir / "a/counts.csv"), read_text(dir / "b/counts.csv"));
  EXPECT_NE(read_text(dir / "a/counts.csv"), read_text(dir / "c/counts.csv"));
  const json ra = read_json(dir / "a/sample_report.json");
  const json rc = read_json(dir / "c/sample_report.json");
  EXPECT_EQ(ra["config_hash"], read_json(dir / "b/sample_report.json")["config_hash"]);
  EXPECT_NE(ra["config_hash"], rc["config_hash"]);
  EXPECT_EQ(ra["config_hash"].get<std::string>(), config_hash(j));
  EXPECT_EQ(ra["shots"].get<std::uint64_t>(), 5000u);
  EXPECT_LE(ra["postselected_shots"].get<std::uint64_t>(), 5000u);
}

TEST(Commands, AnalyzeExactDensityCounts) {
  TempDir dir;
  const json j = {{"target",
                   {{"builtin", "gaussian2d"},
                    {"params", {{"mu", {0.5, 0.5}}, {"sigma_x", 0.22}, {"sigma_y", 0.18}, {"rho", 0.4}}}}},
                  {"basis", "fourier"},
                  {"preprocessing", "characteristic_function"},
                  {"degrees", 3},
                  {"qubits", {5, 5}},
                  {"analysis", {{"counts", "counts.csv"}, {"h_count", 12}}}};
  const fs::path cfg = write_config(dir, "c.json", j);
  const ExperimentConfig parsed = load_config(cfg);
  const SeriesApprox s = make_series(parsed);
  const GridSpec g = make_grid(parsed);
  const auto axes = g.axes();
  const std::vector<cplx> f = evaluate_on_grid(s, axes);
  std::vector<double> target;
  std::vector<std::uint64_t> counts;
  for (const cplx& v : f) {
    target.push_back(std::abs(v));
    counts.push_back(static_cast<std::uint64_t>(std::llround(1000.0 * std::norm(v))));
  }
  {
    std::ofstream os(dir / "counts.csv");
    write_counts_csv(os, counts, g);
  }
  CommandOptions opt;
  opt.out_dir = dir / "out";
  ASSERT_EQ(run("analyze", cfg, opt), 0);
  const json r = read_json(dir / "out/analysis_report.json");
  const Moments m = density_moments(target, axes[0], axes[1]);
  const json& t = r["moments"]["target"];
  EXPECT_NEAR(t["mu_x"].get<double>(), m.mu_x, 1e-12);
  EXPECT_NEAR(t["mu_y"].get<double>(), m.mu_y, 1e-12);
  EXPECT_NEAR(t["var_x"].get<double>(), m.var_x, 1e-12);
  EXPECT_NEAR(t["var_y"].get<double>(), m.var_y, 1e-12);
  EXPECT_NEAR(t["rho"].get<double>(), m.rho, 1e-12);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  EXPECT_EQ(r["samples"].get<std::uint64_t>(), total);
  EXPECT_EQ(r["kde"]["h_grid"].size(), 12u);
  EXPECT_TRUE(fs::exists(dir / "out/kde_estimate.csv"));
}

TEST(Commands, GaussianSampleAnalyzeFidelity) {
  TempDir dir;
  CommandOptions opt;
  opt.out_dir = dir.path();
  const fs::path cfg = kConfigs / "gaussian_uncorrelated.json";
  ASSERT_EQ(run("sample", cfg, opt), 0);
  ASSERT_EQ(run("analyze", cfg, opt), 0);
  const json r = read_json(dir / "analysis_report.json");
  EXPECT_GT(r["fidelity"].get<double>(), 0.95);
  EXPECT_NEAR(r["p_success"].get<double>(), 0.139, 2e-3);
}

#ifdef MVSP_CLI_PATH
namespace {

int shell(const std::string& args) {
  const std::string cmd = std::string("\"") + MVSP_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, SubcommandsAndFlags) {
  TempDir dir;
  const fs::path cfg = write_config(dir, "c.json", ricker_config({3, 7}));
  const std::string out = (dir / "out").string();
  EXPECT_EQ(shell("approx --config " + cfg.string() + " --out " + out), 0);
  EXPECT_TRUE(fs::exists(dir / "out/convergence.csv"));
  EXPECT_EQ(shell("synth --config " + cfg.string() + " --out " + out), 0);
  EXPECT_EQ(shell("simulate --config " + cfg.string() + " --out " + out + " --qubit-cap 10"), 3);
  EXPECT_EQ(shell("sample --config " + cfg.string() + " --out " + out + " --seed 5"), 0);
  EXPECT_EQ(read_json(dir / "out/sample_report.json")["seed"].get<int>(), 5);
  EXPECT_EQ(shell("synth"), 2);
  EXPECT_EQ(shell("synth --config " + (dir / "nope.json").string()), 2);
  EXPECT_EQ(shell("teleport --config " + cfg.string()), 2);
  EXPECT_EQ(shell("--help"), 0);
}
#endif
