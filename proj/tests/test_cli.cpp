#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const fs::path dir = fs::temp_directory_path() / "cpr_cli_capture";
  fs::create_directories(dir);
  const fs::path cap = dir / "stdout.txt";
  const std::string cmd = std::string(CPR_CLI_BIN) + " " + args + " > " + cap.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(cap);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("analyze reports the spanning dimensions") {
  const RunResult r = run_cli("analyze --generator bspline:3");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("dim_W") == 5);
  CHECK(rep.at("dim_W_with_deriv") == 6);
  CHECK(rep.at("spanning") == false);

  const RunResult r2 = run_cli("analyze --generator phi1");
  const json rep2 = json::parse(r2.out);
  CHECK(rep2.at("dim_W") == 6);
  CHECK(rep2.at("spanning") == true);
}

TEST_CASE("frame-check certifies the default frame") {
  const RunResult r = run_cli("frame-check --order 3 --trials 40 --restarts 4 --seed 9");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("sufficient_spanning") == true);
  CHECK(rep.at("monte_carlo_failures") == 0);
  CHECK(rep.at("monte_carlo_max_dist").get<double>() < 1e-8);
}

TEST_CASE("sample/recover round trip through files") {
  const fs::path dir = fresh_dir("cpr_cli_roundtrip");
  write(dir / "spec.json",
        R"({"generator":"bspline:4","seed":11,"coeff":{"offset":-2,"count":7}})");
  REQUIRE(run_cli("sample --spec " + (dir / "spec.json").string() + " --out " + dir.string())
              .exit_code == 0);
  const RunResult rec = run_cli("recover --samples " + (dir / "samples.json").string() +
                                " --truth " + (dir / "truth.json").string() + " --out " +
                                dir.string());
  REQUIRE(rec.exit_code == 0);
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep.at("errors").at("dist").get<double>() < 1e-9);
}

TEST_CASE("experiment output is byte reproducible") {
  const fs::path dir = fresh_dir("cpr_cli_repro");
  write(dir / "spec.json", R"({"generator":"bspline:3","seed":5,"trials":4,"coeff":{"count":5}})");
  REQUIRE(run_cli("experiment --spec " + (dir / "spec.json").string() + " --out " +
                  (dir / "a").string())
              .exit_code == 0);
  REQUIRE(run_cli("experiment --spec " + (dir / "spec.json").string() + " --out " +
                  (dir / "b").string())
              .exit_code == 0);
  CHECK(slurp(dir / "a" / "experiment.csv") == slurp(dir / "b" / "experiment.csv"));
  // header contract
  CHECK(slurp(dir / "a" / "experiment.csv").rfind("trial,seed,ok,dist,", 0) == 0);
}

TEST_CASE("csv sample files parse back losslessly") {
  const fs::path dir = fresh_dir("cpr_cli_csv");
  write(dir / "spec.json",
        R"({"generator":"bspline:3","seed":3,"noise":1e-4,"coeff":{"count":4}})");
  REQUIRE(run_cli("sample --spec " + (dir / "spec.json").string() + " --out " + dir.string())
              .exit_code == 0);
  const std::string csv = slurp(dir / "samples.csv");
  CHECK(csv.rfind("j,node,kind,value", 0) == 0);
  const json samples = json::parse(slurp(dir / "samples.json")).at("samples");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  int expect = 0;
  for (const auto& iv : samples.at("intervals"))
    expect += static_cast<int>(iv.at("f").size() + iv.at("df").size());
  CHECK(rows == expect);
}

TEST_CASE("figure1 emits plot series and error stats") {
  const fs::path dir = fresh_dir("cpr_cli_fig1");
  const RunResult r = run_cli("figure1 --seed 3 --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.contains("max_rel_re"));
  CHECK(rep.contains("max_rel_im"));
  const std::string re_csv = slurp(dir / "figure1_re.csv");
  CHECK(re_csv.rfind("x,re_f,re_frec", 0) == 0);
  // 2048 grid rows plus the header
  CHECK(std::count(re_csv.begin(), re_csv.end(), '\n') == 2049);
}

TEST_CASE("malformed specs exit with code 3") {
  const fs::path dir = fresh_dir("cpr_cli_bad");
  write(dir / "bad.json", "{\"generator\": \"bspline:3\",\n  oops\n}");
  const RunResult r =
      run_cli("sample --spec " + (dir / "bad.json").string() + " --out " + dir.string());
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("bad.json:2") != std::string::npos);  // line-anchored

  write(dir / "unknown.json", R"({"generator":"bspline:3","typo_key":1})");
  const RunResult r2 =
      run_cli("sample --spec " + (dir / "unknown.json").string() + " --out " + dir.string());
  CHECK(r2.exit_code == 3);
  CHECK(r2.out.find("typo_key") != std::string::npos);
}
