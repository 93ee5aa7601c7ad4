#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "clevo/table.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "clevo_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& out) {
  const std::string cmd =
      std::string(CLEVO_CLI_PATH) + " --out " + out.string() + " " + args + " > " + (out / "stdout.txt").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

clevo::Table table(const fs::path& p) { return clevo::Table::from_csv(slurp(p)); }

std::size_t col(const clevo::Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const auto d = scratch("usage");
  CHECK(run("kerr --mode xx", d) == 2);
  CHECK(run("kerr", d) == 2);
  CHECK(run("jc --solver magic", d) == 2);
  CHECK(run("", d) == 2);
  CHECK(run("ensemble --N 12 --K 5", d) == 2);
  CHECK(slurp(d / "stdout.txt").find("1,2,3,4,6,12") != std::string::npos);
  CHECK(run("ensemble --N 300 --K 3 --oracle", d) == 2);
  CHECK(run("engine --model none", d) == 2);
}

TEST_CASE("numeric failures exit with 1") {
  const auto d = scratch("numeric");
  // The cat does not fit into a 10-level Fock space.
  CHECK(run("kerr --mode qq --cutoff 10 --nx 11 --np 11", d) == 1);
  CHECK(slurp(d / "stdout.txt").find("truncation") != std::string::npos);
}

TEST_CASE("kerr classical panel stays non-negative") {
  const auto d = scratch("kerr_cc");
  REQUIRE(run("kerr --mode cc", d) == 0);
  const auto w = table(d / "wigner_cc.csv");
  CHECK(w.rows.size() == 301 * 301);
  double mn = 1.0;
  for (const auto& r : w.rows) mn = std::min(mn, r[2]);
  CHECK(mn >= -1e-9);
  CHECK(fs::exists(d / "traj_cc.csv"));
  const auto meta = nlohmann::json::parse(slurp(d / "kerr_cc.json"));
  CHECK(meta["parameters"]["alpha0"] == 3.0);
  CHECK(meta["version"].get<std::string>().size() > 0);
}

TEST_CASE("kerr quantum panel has negative entries") {
  const auto d = scratch("kerr_cq");
  REQUIRE(run("kerr --mode cq", d) == 0);
  const auto w = table(d / "wigner_cq.csv");
  double mn = 1.0;
  for (const auto& r : w.rows) mn = std::min(mn, r[2]);
  CHECK(mn < 0.0);
}

TEST_CASE("kerr qq and qc coincide at t = 0") {
  const auto d = scratch("kerr_t0");
  REQUIRE(run("kerr --mode qq --t-over-kappa 0", d) == 0);
  REQUIRE(run("kerr --mode qc --t-over-kappa 0", d) == 0);
  const auto a = table(d / "wigner_qq.csv"), b = table(d / "wigner_qc.csv");
  REQUIRE(a.rows.size() == b.rows.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) worst = std::max(worst, std::abs(a.rows[i][2] - b.rows[i][2]));
  CHECK(worst < 1e-8);
}

TEST_CASE("jc analytic row at t = 0") {
  const auto d = scratch("jc_t0");
  REQUIRE(run("jc --solver analytic --t 0", d) == 0);
  const auto t = table(d / "jc_analytic.csv");
  REQUIRE(t.rows.size() == 1);
  const auto& r = t.rows[0];
  CHECK(r[col(t, "re_alpha")] == 0.0);
  CHECK(r[col(t, "im_alpha")] == 0.0);
  CHECK(std::abs(r[col(t, "re_g")] - (1.0 / std::numbers::sqrt2)) < 1e-15);
  CHECK(std::abs(r[col(t, "re_e")] - (1.0 / std::numbers::sqrt2)) < 1e-15);
}

TEST_CASE("jc compare reports a small deviation") {
  const auto d = scratch("jc_cmp");
  REQUIRE(run("jc --compare", d) == 0);
  const auto meta = nlohmann::json::parse(slurp(d / "jc_numeric.json"));
  CHECK(meta["comparison"]["max_deviation"].get<double>() <= 1e-6);
}

TEST_CASE("jc quantum entropy vanishes at kappa t = 0 and pi") {
  const auto d = scratch("jc_q");
  REQUIRE(run("jc --solver quantum", d) == 0);
  const auto t = table(d / "jc_quantum.csv");
  const auto kt = col(t, "kappa_t"), s = col(t, "entropy");
  int hits = 0;
  for (const auto& r : t.rows) {
    if (std::abs(r[kt]) < 1e-12 || std::abs(r[kt] - std::numbers::pi) < 1e-12) {
      CHECK(r[s] < 1e-10);
      ++hits;
    }
  }
  CHECK(hits == 2);
}

TEST_CASE("ensemble reference sweep") {
  const auto d = scratch("ens");
  REQUIRE(run("ensemble --N 3628800 --K 2,3,...,10 --R 1e-6", d) == 0);
  const auto c = table(d / "ensemble_curves.csv");
  REQUIRE(c.rows.size() == 9);
  CHECK(c.rows.back()[col(c, "K")] == 10.0);
  CHECK(std::abs(c.rows.back()[col(c, "max_ratio")] - 4.26592) < 1e-6);
  const auto meta = nlohmann::json::parse(slurp(d / "ensemble.json"));
  CHECK(meta["parameters"]["K"].size() == 9);
}

TEST_CASE("ensemble oracle report") {
  const auto d = scratch("ens_oracle");
  REQUIRE(run("ensemble --N 12 --K 3 --R 0.1 --oracle", d) == 0);
  const auto meta = nlohmann::json::parse(slurp(d / "ensemble.json"));
  CHECK(meta["oracle"]["max_elementwise_deviation"].get<double>() <= 1e-9);
}

TEST_CASE("engine run") {
  const auto d = scratch("engine");
  REQUIRE(run("engine --model schrodinger --dim 4 --seed 9", d) == 0);
  const auto meta = nlohmann::json::parse(slurp(d / "engine_schrodinger.json"));
  CHECK(meta["report"]["max_reference_deviation"].get<double>() < 1e-8);
}

TEST_CASE("reruns are byte-identical") {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  for (const auto& d : {a, b}) {
    REQUIRE(run("jc --solver numeric --kt-max 3", d) == 0);
    REQUIRE(run("ensemble --N 24 --K 2,3,4", d) == 0);
    REQUIRE(run("engine --model schrodinger --seed 4", d) == 0);
  }
  for (const char* f : {"jc_numeric.csv", "ensemble_sweep.csv", "engine_schrodinger.csv", "jc_numeric.json",
                        "ensemble.json"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("thread count from the environment does not change results") {
  const auto a = scratch("threads_a"), b = scratch("threads_b");
  REQUIRE(run("kerr --mode cq --nx 61 --np 61", a) == 0);
  REQUIRE(std::system((std::string("CLEVO_NUM_THREADS=2 ") + CLEVO_CLI_PATH + " --out " + b.string() +
                       " kerr --mode cq --nx 61 --np 61 > /dev/null").c_str()) == 0);
  CHECK(slurp(a / "wigner_cq.csv") == slurp(b / "wigner_cq.csv"));
}
