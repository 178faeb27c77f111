#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "abnormal/cli.hpp"
#include "abnormal/errors.hpp"
#include "doctest.h"

using namespace abnormal;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("abnormal_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json report(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "report.json")); }

int run_cli(const std::string& command, const fs::path& cfg, const fs::path& out) {
  RunOptions o;
  o.command = command;
  o.config_path = cfg.string();
  o.out_dir = out.string();
  std::ostringstream log;
  return run(o, log);
}

const char* kConst4 = "[system]\npreset = const4\n[run]\nT = %g\n";

std::string const4_text(double T) {
  char buf[128];
  std::snprintf(buf, sizeof buf, kConst4, T);
  return buf;
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_config("[system]\npreset = martinet\nalpha = 2\n[run]\nT = 0.5\nseed = 7\n");
  CHECK(c.preset == "martinet");
  CHECK(c.alpha == 2.0);
  CHECK(c.T == 0.5);
  CHECK(c.seed == 7u);
  CHECK(c.dimension == 3);
  CHECK(c.x0.size() == 3);
  CHECK_FALSE(c.coefficients.has_value());

  auto d = parse_config(const4_text(1.0));
  REQUIRE(d.coefficients.has_value());
  CHECK(d.coefficients->at(0.3)(0, 0) == -1.0);
  CHECK(d.coefficients->at(0.3)(1, 1) == 1.0);
  CHECK(d.dimension == 4);

  auto e = parse_config(
      "[system]\ndimension = 3\nX = 1, 0, x2^2/2\nY = 0, 1, 0\nx0 = 0, 0, 0\n[run]\nsector_eps = 0.1, 0.2\n");
  CHECK(e.system().dimension() == 3);
  CHECK(e.sector_eps.size() == 2);
  Eigen::Vector3d p(0.3, 0.4, 0.0);
  CHECK(e.system().drift(p)[2] == doctest::Approx(0.08));

  auto f = parse_config("[system]\npreset = martinet\n[coefficients]\nb11 = 0.5\n");
  REQUIRE(f.coefficients.has_value());
  CHECK(f.coefficient_source == "constants");
}

TEST_CASE("coefficient table from csv") {
  auto dir = scratch("table");
  write_file(dir / "b.csv", "t,b11\n0,0.5\n1,1.5\n4,1.5\n");
  auto c = parse_config("[system]\npreset = martinet\n[coefficients]\ntable = b.csv\n", dir.string());
  REQUIRE(c.coefficients.has_value());
  CHECK(c.coefficients->at(0.5)(0, 0) == doctest::Approx(1.0));
  CHECK(c.coefficient_source == "table");
}

TEST_CASE("malformed configs") {
  CHECK_THROWS_AS(parse_config("[system]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = nope\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = martinet\nX = 1, 0, 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = martinet\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n[system]\npreset = martinet\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = martinet\n[tolerances]\nassumption = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = martinet\n[run]\nT = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = martinet\nx0 = 0, 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\npreset = const4\n[coefficients]\nb11 = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\ndimension = 3\nX = 1, 0, (x2\nY = 0, 1, 0\n"), ParseError);
}

TEST_CASE("config hash") {
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("const4 boundary sign follows the conjugate time") {
  auto one = run_command("boundary", parse_config(const4_text(1.0)), scratch("c4_1").string(), 1);
  CHECK(one["boundary"]["A_T"].get<double>() > 0);
  CHECK(one["boundary"]["sign"] == "positive");
  auto four = run_command("boundary", parse_config(const4_text(4.0)), scratch("c4_4").string(), 1);
  CHECK(four["boundary"]["A_T"].get<double>() < 0);
  CHECK(four["boundary"]["sign"] == four["boundary"]["expected_sign"]);
  CHECK(four["config_hash"] != one["config_hash"]);
}

TEST_CASE("classify const4 between the two conjugate times") {
  auto j = run_command("classify", parse_config(const4_text(4.0)), scratch("cls").string(), 1);
  CHECK(j["classify"]["time_minimal"] == false);
  CHECK(j["classify"]["fixed_time_cost_minimal"] == true);
  CHECK(j["classify"]["sr_c0_optimal"] == false);
  auto k = run_command("classify", parse_config(const4_text(7.0)), scratch("cls7").string(), 1);
  CHECK(k["classify"]["fixed_time_cost_minimal"] == false);
}

TEST_CASE("martinet has no conjugate time up to the scan bound") {
  auto dir = scratch("mct");
  auto j = run_command("conjugate-times", parse_config("[system]\npreset = martinet\n"), dir.string(), 1);
  CHECK(j["conjugate_times"]["t_cc"] == "none");
  CHECK(j["conjugate_times"]["t_c"] == "none");
  CHECK(j["conjugate_times"]["scan_max"].get<double>() == 10.0);
  CHECK(fs::exists(dir / "spectrum.csv"));
}

TEST_CASE("exit codes and artifacts") {
  auto dir = scratch("exit");
  auto good = write_file(dir / "good.ini", "[system]\npreset = martinet\nalpha = 1\n[run]\nsamples = 2000\n");
  auto degenerate = write_file(dir / "a0.ini", "[system]\npreset = martinet\nalpha = 0\n");
  auto broken = write_file(dir / "bad.ini", "[system]\npreset = martinet\nalpha = one\n");

  CHECK(run_cli("check-assumptions", good, dir / "ok") == 0);
  CHECK(report(dir / "ok")["status"] == "ok");

  CHECK(run_cli("check-assumptions", degenerate, dir / "a0") == 2);
  auto a0 = report(dir / "a0");
  CHECK(a0["status"] == "assumption_failure");
  CHECK(a0["assumptions"]["verdicts"]["H1"]["pass"] == false);

  CHECK(run_cli("boundary", broken, dir / "bad") == 1);
  CHECK(run_cli("boundary", dir / "missing.ini", dir / "missing") == 1);
  CHECK(run_cli("nonsense", good, dir / "cmd") == 1);

  CHECK(run_cli("sample", good, dir / "s") == 0);
  CHECK(fs::exists(dir / "s" / "cloud.csv"));
  CHECK(run_cli("boundary", good, dir / "b") == 0);
  CHECK(slurp(dir / "b" / "curve.csv").rfind("x1,xn\n", 0) == 0);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  auto dir = scratch("repro");
  auto cfg = write_file(dir / "c.ini", "[system]\npreset = martinet\n[run]\nsamples = 3000\nseed = 11\n");
  REQUIRE(run_cli("sample", cfg, dir / "a") == 0);
  REQUIRE(run_cli("sample", cfg, dir / "b") == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "cloud.csv") == slurp(dir / "b" / "cloud.csv"));

  RunOptions o;
  o.command = "sample";
  o.config_path = cfg.string();
  o.out_dir = (dir / "c").string();
  o.seed_override = 12;
  std::ostringstream log;
  REQUIRE(run(o, log) == 0);
  auto c = report(dir / "c");
  CHECK(c["seed"] == 12);
  CHECK(slurp(dir / "a" / "cloud.csv") != slurp(dir / "c" / "cloud.csv"));

  o.out_dir = (dir / "d").string();
  o.seed_override.reset();
  o.threads = 3;
  REQUIRE(run(o, log) == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "d" / "report.json"));
}

TEST_CASE("report header") {
  auto j = run_command("check-assumptions", parse_config("[system]\npreset = martinet\n"), scratch("hdr").string(), 1);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(j["tolerances"].contains("assumption"));
  CHECK(j["tolerances"].contains("conjugate_time"));
  CHECK(j["command"] == "check-assumptions");
}
