#include <doctest.h>

#include "spsolve/driver.hpp"
#include "spsolve/report_io.hpp"
#include "spsolve/diagnostics.hpp"
#include "spsolve/runconfig.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace spsolve;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

std::string scratch_dir(const char* name) {
  auto dir = fs::temp_directory_path() / "spsolve_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kGroundstateToml = R"(
# groundstate run, coercive homogeneous weight
[problem]
dim = 3
q = 4.0
lambda = 1.0

[weight]
kind = "homogeneous"
kbar = 2.0

[grid]
r_max = 9.0
n = 512

[solver]
mode = "groundstate"

[output]
formats = ["csv", "json", "svg"]
)";

} // namespace

TEST_CASE("toml subset and json configs parse to the same run") {
  RunConfig a = parse_config_text(kGroundstateToml, false);
  CHECK(a.problem.dim == 3);
  CHECK(a.problem.q == 4.0);
  CHECK(a.weight.kind == WeightKind::homogeneous);
  CHECK(a.n == 512);
  CHECK(a.mode == SolveMode::groundstate);

  const char* json = R"({
    "problem": {"dim": 3, "q": 4.0, "lambda": 1.0},
    "weight": {"kind": "homogeneous", "kbar": 2.0},
    "grid": {"r_max": 9.0, "n": 512},
    "solver": {"mode": "groundstate"},
    "output": {"formats": ["csv", "json", "svg"]}
  })";
  RunConfig b = parse_config_text(json, true);
  CHECK(b.problem.q == a.problem.q);
  CHECK(b.weight.kbar == a.weight.kbar);
  CHECK(b.r_max == a.r_max);
  CHECK(b.formats == a.formats);
}

TEST_CASE("config validation cites the violated constraint") {
  auto expect_throw = [](const std::string& text, const char* needle) {
    try {
      parse_config_text(text, false);
      FAIL("expected a validation error for: " << needle);
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_throw("[problem]\ndim = 7\n", "dim must be 3, 4 or 5");
  expect_throw("[problem]\nq = 9.0\n", "q must lie in (1, 2*-1]");
  expect_throw("[problem]\nmu = 0.1\n", "mu must lie in [1/2, 1]");
  expect_throw("[grid]\nn = 4\n", "n >= 16");
  expect_throw("[solver]\nmode = \"continuation\"\n[problem]\nq = 4.0\n",
               "continuation requires q in (2, 3)");
  expect_throw("[solver]\nmode = \"nonexistence\"\n[problem]\nq = 2.0\nlambda = 0.2\n",
               "lambda >= 1/2");
  expect_throw("[solver]\nmode = \"nonexistence\"\n[problem]\nq = 2.0\n"
               "[weight]\nkind = \"homogeneous\"\nkbar = 1.0\n",
               "rho >= 1");
  expect_throw("[problem]\nnu = 1.0\nkbar = 1.0\nq = 2.5\n", "nu violates");
  expect_throw("[weight]\nkind = \"nope\"\n", "unknown weight kind");
}

TEST_CASE("run writes profile, report and svg artifacts") {
  RunConfig cfg = parse_config_text(kGroundstateToml, false);
  cfg.out_directory = scratch_dir("run_gs");
  const auto out = run(cfg);
  CHECK(out.exit_code == 0);
  REQUIRE(out.files.size() == 5);
  for (const auto& f : out.files)
    CHECK(fs::exists(f));

  // CSV basics: header + '.' decimals + LF endings
  const std::string csv = slurp(out.files[0]);
  CHECK(csv.rfind("r,u,phi\n", 0) == 0);
  CHECK(csv.find(',') != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);

  // report JSON round-trips the level bit-exactly
  const double level = read_report_level(out.files[1]);
  const ProfileData prof = read_profile_csv(out.files[0]);
  CHECK(prof.r.size() == cfg.n);
  RunConfig again = cfg;
  again.out_directory = scratch_dir("run_gs2");
  const auto out2 = run(again);
  CHECK(read_report_level(out2.files[1]) == level); // deterministic + lossless
}

TEST_CASE("critical exponent request fails with the nonexistence explanation") {
  RunConfig cfg = parse_config_text(kGroundstateToml, false);
  cfg.problem.q = 5.0; // 2*-1 for N = 3
  cfg.out_directory = scratch_dir("run_crit");
  const auto out = run(cfg);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("int u^2") != std::string::npos);
}

TEST_CASE("nonexistence mode exits 0 on decay") {
  RunConfig cfg;
  cfg.problem.q = 2.0;
  cfg.problem.lambda = 1.0;
  cfg.weight = WeightModel::make_coercive(1.0, 2.0, 1.0);
  cfg.mode = SolveMode::nonexistence;
  cfg.n = 256;
  cfg.r_max = 8.0;
  cfg.init_kind = "random";
  cfg.out_directory = scratch_dir("run_nonex");
  const auto out = run(cfg);
  CHECK(out.exit_code == 0);
}

TEST_CASE("sweep: ordered rows, failures kept, empty list allowed") {
  RunConfig cfg = parse_config_text(kGroundstateToml, false);
  cfg.n = 256;
  cfg.formats = {"csv"};
  cfg.out_directory = scratch_dir("sweep");

  const auto out = sweep(cfg, "lambda", {1.0, 0.5, 2.0}, 2);
  CHECK(out.exit_code == 0);
  const std::string csv = slurp(out.files[0]);
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "lambda,level,grad_residual,nehari_residual,pohozaev_residual,converged");
  std::vector<double> values;
  while (std::getline(ss, line))
    values.push_back(std::stod(line.substr(0, line.find(','))));
  REQUIRE(values.size() == 3);
  CHECK(values[0] == 0.5); // sorted by axis value
  CHECK(values[1] == 1.0);
  CHECK(values[2] == 2.0);

  const auto empty = sweep(cfg, "lambda", {}, 1);
  CHECK(empty.exit_code == 0);

  const auto bad = sweep(cfg, "banana", {1.0}, 1);
  CHECK(bad.exit_code == 1);
}

TEST_CASE("mu sweep reproduces the continuation monotonicity") {
  RunConfig cfg;
  cfg.problem.q = 2.5;
  cfg.problem.lambda = 1.0;
  cfg.weight = WeightModel::make_homogeneous(1.0);
  cfg.n = 256;
  cfg.r_max = 10.0;
  cfg.formats = {"csv"};
  cfg.out_directory = scratch_dir("sweep_mu");
  const auto out = sweep(cfg, "mu", {0.5, 0.75, 1.0}, 2);
  REQUIRE(out.exit_code == 0);
  std::ifstream in(out.files[0]);
  std::string line;
  std::getline(in, line);
  std::vector<double> levels;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    levels.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  REQUIRE(levels.size() == 3);
  CHECK(levels[1] <= levels[0] + 1e-4);
  CHECK(levels[2] <= levels[1] + 1e-4);
}

TEST_CASE("plot: determinism and error paths") {
  RunConfig cfg = parse_config_text(kGroundstateToml, false);
  cfg.n = 256;
  cfg.formats = {"csv"};
  cfg.out_directory = scratch_dir("plot_src");
  const auto res = run(cfg);
  REQUIRE(res.exit_code == 0);

  const std::string out1 = scratch_dir("plot_a");
  const std::string out2 = scratch_dir("plot_b");
  const auto p1 = plot(res.files[0], out1);
  const auto p2 = plot(res.files[0], out2);
  REQUIRE(p1.exit_code == 0);
  REQUIRE(p2.exit_code == 0);
  REQUIRE(p1.files.size() == p2.files.size());
  for (std::size_t i = 0; i < p1.files.size(); ++i)
    CHECK(slurp(p1.files[i]) == slurp(p2.files[i])); // byte-identical

  const auto missing = plot("/nonexistent/file.csv", out1);
  CHECK(missing.exit_code == 1);
  CHECK(missing.files.empty());

  // zero-length profile: error, no file written
  const std::string empty_csv = out1 + "/empty.csv";
  std::ofstream(empty_csv) << "r,u,phi\n";
  const auto zero = plot(empty_csv, out1);
  CHECK(zero.exit_code == 1);
  CHECK(zero.files.empty());
}

TEST_CASE("constants report serializes to JSON") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(3, 10.0, 512));
  Field v = Field::from_function(grid, [](double r) {
    return r < 0.9 ? std::exp(-1.0 / (1.0 - std::pow(r / 0.9, 2.0))) : 0.0;
  });
  const auto rep = constants_report(
      3.5, 2.0, 1.0, WeightModel::make_vanishing_ball(1.0, 2.0, 1.0), v);
  const std::string path = scratch_dir("constants") + "/constants.json";
  write_constants_json(path, rep);
  const std::string text = slurp(path);
  CHECK(text.find("\"sobolev_S\"") != std::string::npos);
  CHECK(text.find("\"lambda1\"") != std::string::npos);
}

TEST_CASE("verify battery passes") {
  std::ostringstream log;
  CHECK(verify(log) == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
}

TEST_SUITE_END();
