#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  fs::path log = dir / "run.log";
  std::string cmd = std::string(TWISTBAND_BIN) + " " + args + " > " +
                    log.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path sandbox(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "twistband_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("missing required option exits 2 and names the parameter") {
  fs::path dir = sandbox("missing");
  RunResult r = run_cli("bands --gamma 1", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("eps") != std::string::npos);
}

TEST_CASE("unknown subcommand exits 2") {
  fs::path dir = sandbox("unknown");
  RunResult r = run_cli("frobnicate", dir);
  CHECK(r.code == 2);
}

TEST_CASE("untwisted bands hit the box value and emit a manifest") {
  fs::path dir = sandbox("bands0");
  RunResult r = run_cli(
      "--out " + dir.string() + " bands --gamma 0 --eps 0.5 --pcount 5 --m 256",
      dir);
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(dir / "manifest.json"));
  REQUIRE(fs::exists(dir / "bands.csv"));
  REQUIRE(fs::exists(dir / "bands.dat"));
  std::string thr = slurp(dir / "threshold.json");
  // lambda_1(0) = pi^2 = 9.8696... for gamma = 0, eps = 0.5
  CHECK(thr.find("9.86960") != std::string::npos);
}

TEST_CASE("identical config gives byte-identical CSV output") {
  fs::path d1 = sandbox("det1"), d2 = sandbox("det2");
  std::string args = "bands --gamma 1 --eps 0.1 --pcount 9 --m 128";
  REQUIRE(run_cli("--out " + d1.string() + " " + args, d1).code == 0);
  REQUIRE(run_cli("--out " + d2.string() + " " + args, d2).code == 0);
  CHECK(slurp(d1 / "bands.csv") == slurp(d2 / "bands.csv"));
  CHECK(slurp(d1 / "bands.csv") != "");
}

TEST_CASE("certify zero preset reports no negative rows") {
  fs::path dir = sandbox("certify0");
  RunResult r = run_cli("--out " + dir.string() +
                            " certify --preset zero --deltas 0.1 --eps 0.05 "
                            "--m 128",
                        dir);
  REQUIRE(r.code == 0);
  std::string csv = slurp(dir / "certify.csv");
  // one data row; the gap column (4th) must be positive
  auto nl = csv.find('\n');
  REQUIRE(nl != std::string::npos);
  std::string row = csv.substr(nl + 1);
  std::stringstream ss(row);
  std::string cellv;
  for (int i = 0; i < 4; ++i) std::getline(ss, cellv, ',');
  CHECK(std::stod(cellv) > 0.0);
}

TEST_CASE("certify with every cell failing exits 3") {
  fs::path dir = sandbox("certify3");
  // eps far outside the positivity window: every sweep cell errors out
  RunResult r = run_cli("--out " + dir.string() +
                            " certify --preset zero --deltas 0.1 --eps 2.0 "
                            "--m 128",
                        dir);
  CHECK(r.code == 3);
}

TEST_CASE("validate-family flags the bounded-rate family and still exits 0") {
  fs::path dir = sandbox("family");
  RunResult r = run_cli("--out " + dir.string() +
                            " validate-family --family constant --eps 0.1",
                        dir);
  REQUIRE(r.code == 0);
  std::string csv = slurp(dir / "conditions.csv");
  CHECK(csv.find("I,0") != std::string::npos);  // condition I failed
  std::string js = slurp(dir / "family.json");
  CHECK(js.find("\"all_passed\": false") != std::string::npos);
}

TEST_CASE("frame run writes invariants") {
  fs::path dir = sandbox("frame");
  RunResult r = run_cli("--out " + dir.string() +
                            " frame --n 1 --kappa 1 --smin 0 --smax 6.3 "
                            "--step 0.01",
                        dir);
  REQUIRE(r.code == 0);
  std::string js = slurp(dir / "frame.json");
  CHECK(js.find("gram_deviation") != std::string::npos);
  CHECK(js.find("closure_error") != std::string::npos);
}

TEST_CASE("surface export yields a positive Jacobian") {
  fs::path dir = sandbox("surface");
  RunResult r = run_cli("--out " + dir.string() +
                            " export-surface --eps 0.2 --profile constant "
                            "--gamma 1 --smin -2 --smax 2 --step 0.1 --nt 5",
                        dir);
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(dir / "surface.obj"));
  std::string js = slurp(dir / "surface.json");
  auto pos = js.find("min_det_jacobian");
  REQUIRE(pos != std::string::npos);
  CHECK(js.find("-", pos) > js.find("\n", pos));  // value not negative
}

TEST_CASE("TWISTBAND_JOBS must be a positive integer") {
  fs::path dir = sandbox("jobs");
  std::string cmd = "TWISTBAND_JOBS=banana " + std::string(TWISTBAND_BIN) +
                    " --out " + dir.string() +
                    " bands --gamma 0 --eps 0.5 --pcount 3 --m 64 > " +
                    (dir / "run.log").string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(raw) == 2);
}
