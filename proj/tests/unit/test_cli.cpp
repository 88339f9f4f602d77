#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gamow/cli/commands.hpp"
#include "oracle/oracle_values.hpp"

using namespace gamow;
using namespace gamow::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() /
                     ("gamow_lab_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Data rows of a CSV output, comment lines and header dropped.
std::vector<std::vector<std::string>> rows(const fs::path &p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(p));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
      cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

int run(const std::string &args) {
  const int status = std::system((std::string(GAMOW_LAB_EXE) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig config_in(const fs::path &dir) {
  RunConfig c;
  c.out_dir = dir.string();
  return c;
}

} // namespace

TEST_CASE("config parsing and round trip") {
  RunConfig c;
  c.lambda = 30.0;
  c.profile = "gauss:0.4,0.1";
  c.times.text = "1:100:5";
  c.policy = Policy::both;
  c.format = Format::json;
  c.validate();
  const auto j = c.to_json();
  const RunConfig back = RunConfig::from_json(j);
  CHECK(back.to_json().dump() == j.dump());
  CHECK(j.begin().key() == "lambda");

  CHECK(parse_profile("box:2", 1.0).mode() == 2);
  CHECK(parse_profile("gauss:0.5,0.1", 1.0).kind() == ProfileKind::truncated_gaussian);
  CHECK_THROWS_AS(parse_profile("box:0", 1.0), UsageError);
  CHECK_THROWS_AS(parse_profile("box:1.5", 1.0), UsageError);
  CHECK_THROWS_AS(parse_profile("tent:1", 1.0), UsageError);
  CHECK_THROWS_AS(parse_policy("fast"), UsageError);
  CHECK_THROWS_AS(parse_format("xml"), UsageError);

  CHECK(TimeGrid{"1:10:4"}.resolve(1.0).size() == 5);
  CHECK(TimeGrid{"2tau"}.resolve(3.0).at(0) == 6.0);
  CHECK_THROWS_AS(TimeGrid{""}.resolve(1.0), UsageError);
  CHECK_THROWS_AS(TimeGrid{"-1"}.resolve(1.0), UsageError);
  CHECK_THROWS_AS(TimeGrid{"5:1:3"}.resolve(1.0), UsageError);
  CHECK_THROWS_AS(TimeGrid{"0:1:3"}.resolve(1.0), UsageError);

  RunConfig bad;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("exit codes") {
  CHECK(exit_code(UsageError("x")) == 1);
  CHECK(exit_code(CountMismatch("x")) == 2);
  CHECK(exit_code(QuadratureNotConverged("x", 1.0)) == 3);
}

TEST_CASE("poles command") {
  const fs::path dir = scratch("poles");
  RunConfig c = config_in(dir);
  c.k_max = 16.0;
  const auto res = cmd_poles(c);
  REQUIRE(res.files.size() == 1);
  const auto table = rows(res.files[0]);
  REQUIRE(table.size() == 5);
  CHECK(std::stod(table[0][1]) == doctest::Approx(3.1105).epsilon(1e-4));
  CHECK(std::stod(table[0][2]) == doctest::Approx(oracle::k1_lambda100.imag()).epsilon(1e-12));
  CHECK(std::stod(table[0][5]) == doctest::Approx(84.0586).epsilon(1e-5));
  CHECK(table[0][8].empty());
  CHECK(slurp(res.files[0]).rfind("# gamow_lab 1.0.0\n# config {", 0) == 0);

  c.k_max = 3.0;
  CHECK(rows(cmd_poles(c).files[0]).empty());

  c.lambda = 0.5;
  c.k_max = 8.0;
  const auto weak = rows(cmd_poles(c).files[0]);
  REQUIRE(!weak.empty());
  for (const auto &r : weak)
    CHECK(r[8] == "non-metastable");
}

TEST_CASE("evolve command") {
  const fs::path dir = scratch("evolve");
  RunConfig c = config_in(dir);
  c.times.text = "0";
  const auto res = cmd_evolve(c);
  const auto snap = rows(dir / "evolve_000.csv");
  REQUIRE(snap.size() == 257);
  double err = 0.0;
  for (const auto &r : snap) {
    const double x = std::stod(r[0]);
    err = std::max(err, std::abs(std::stod(r[3]) - 2 * std::pow(std::sin(std::numbers::pi * x), 2)));
  }
  CHECK(err < 1e-4);

  c.times.text = "1tau";
  c.policy = Policy::both;
  c.format = Format::json;
  cmd_evolve(c);
  const auto j = nlohmann::json::parse(slurp(dir / "evolve.json"));
  CHECK(j["version"] == "1.0.0");
  CHECK(j["config"]["policy"] == "both");
  CHECK(j["snapshots"][0]["discrepancy"].get<double>() < 1e-6);
  CHECK(j["snapshots"][0]["states"].size() == 2);

  c.times.text = "-1";
  CHECK_THROWS_AS(cmd_evolve(c), UsageError);
  c.times.text = "";
  CHECK_THROWS_AS(cmd_evolve(c), UsageError);
}

TEST_CASE("survival command") {
  const fs::path dir = scratch("survival");
  RunConfig c = config_in(dir);
  cmd_survival(c);
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  const double ratio = j["report"]["gamma_fit"].get<double>() / j["report"]["gamma1_exact"].get<double>();
  CHECK(ratio >= 0.98);
  CHECK(ratio <= 1.02);
  CHECK(!rows(dir / "survival.csv").empty());

  c.lambda = 10.0;
  cmd_survival(c);
  j = nlohmann::json::parse(slurp(dir / "report.json"));
  const double s = j["report"]["s_fit"].get<double>();
  CHECK(s >= -3.15);
  CHECK(s <= -2.85);

  c.times.text = "5:1:3";
  CHECK_THROWS_AS(cmd_survival(c), UsageError);
}

TEST_CASE("report command") {
  const fs::path dir = scratch("report");
  RunConfig c = config_in(dir);
  c.lambda = 10.0;
  const auto res = cmd_report(c);
  CHECK(res.summary.find("10 tau_1 ln lambda") != std::string::npos);
  CHECK(fs::exists(dir / "report.txt"));
}

TEST_CASE("outputs are deterministic and written atomically") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto &dir : {a, b}) {
    RunConfig c = config_in(dir);
    c.lambda = 10.0;
    c.times.text = "0.01:10:5";
    cmd_survival(c);
  }
  // The echoed output directory differs; everything else must match.
  auto strip = [](std::string s, const std::string &dir) {
    for (auto pos = s.find(dir); pos != std::string::npos; pos = s.find(dir))
      s.erase(pos, dir.size());
    return s;
  };
  for (const char *name : {"survival.csv", "report.json"})
    CHECK(strip(slurp(a / name), a.string()) == strip(slurp(b / name), b.string()));
  for (const auto &e : fs::directory_iterator(a))
    CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("exe");
  const std::string out = " --out " + dir.string();
  CHECK(run("poles --lambda 100 --kmax 16" + out) == 0);
  CHECK(run("poles --lambda 100 --kmax 3" + out) == 0);
  CHECK(run("evolve --times=-1" + out) == 1);
  CHECK(run("survival --times 5:1:3" + out) == 1);
  CHECK(run("poles --lambda abc" + out) == 1);
  CHECK(run("poles --policy fast" + out) == 1);
  CHECK(run("" + out) == 1);
  CHECK(run("--help") == 0);
}
