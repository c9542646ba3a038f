#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "relay_aser/config.hpp"
#include "relay_aser/modulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = RELAY_ASER_CLI;
const fs::path kSource = RELAY_ASER_SOURCE_DIR;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("relay_aser_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const json& j) const {
    const auto f = path / name;
    std::ofstream(f) << j.dump(2);
    return f.string();
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path / name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
};

json scenario(double start, double stop, double step = 1.0) {
  return json{{"system",
               {{"links",
                 {{"sd", {{"type", "eta-mu"}, {"eta", 1}, {"mu", 2}}},
                  {"sr", {{"type", "eta-mu"}, {"eta", 1}, {"mu", 2}}},
                  {"rd", {{"type", "kappa-mu"}, {"kappa", 2}, {"mu", 2}}}}},
                {"sweep", {{"start_db", start}, {"stop_db", stop}, {"step_db", step}}}}},
              {"constellation", {{"type", "rqam"}, {"mi", 4}, {"mq", 2}, {"beta", 1}}}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("csv header is stable") {
  TempDir t;
  auto r = run("aser --config " + t.write("a.json", scenario(10, 12)));
  REQUIRE(r.code == 0);
  auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "snr_db,aser_exact,aser_asym");
  CHECK(l[1].rfind("10,", 0) == 0);
  CHECK(l[3].rfind("12,", 0) == 0);

  auto j = scenario(10, 10);
  j["outputs"] = {"exact", "asymptotic", "montecarlo"};
  j["sim"] = {{"trials", 2000}};
  r = run("aser --config " + t.write("b.json", j));
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "snr_db,aser_exact,aser_asym,mc_aser,mc_stderr");

  r = run("simulate --trials 500 --config " + t.write("c.json", scenario(10, 10)));
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "snr_db,aser_exact,aser_asym,mc_aser,mc_stderr");

  r = run("asym --config " + t.write("d.json", scenario(40, 40)));
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "snr_db,aser_asym,e1,d1,e2,d2");
}

TEST_CASE("single-point sweep and values") {
  TempDir t;
  const auto j = scenario(20, 20);
  const auto r = run("aser --config " + t.write("a.json", j));
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  const auto s = relay_aser::config::scenario_from_json(j);
  const double exact = relay_aser::modulation::aser(s.system_at(20.0), s.constellation);
  const double printed = std::stod(l[1].substr(3, l[1].find(',', 3) - 3));
  CHECK(printed == exact);
}

TEST_CASE("rows follow the grid for any worker count") {
  TempDir t;
  const auto f = t.write("a.json", scenario(0, 30, 1.5));
  const auto one = run("aser --workers 1 --config " + f);
  const auto many = run("aser --workers 8 --config " + f);
  REQUIRE(one.code == 0);
  CHECK(lines(one.out).size() == 22);
  CHECK(one.out == many.out);
}

TEST_CASE("direct-only suppresses the relay") {
  TempDir t;
  auto j = scenario(15, 15);
  const auto f = t.write("a.json", j);
  const auto r = run("aser --direct-only --config " + f);
  REQUIRE(r.code == 0);
  j["system"]["direct_only"] = true;
  const auto s = relay_aser::config::scenario_from_json(j);
  const double expect = relay_aser::modulation::aser(s.system_at(15.0), s.constellation);
  const auto row = lines(r.out).at(1);
  CHECK(std::stod(row.substr(3)) == expect);
  CHECK(run("aser --config " + f).out != r.out);
}

TEST_CASE("seeded simulation is reproducible") {
  TempDir t;
  const auto f = t.write("a.json", scenario(10, 20, 5));
  const std::string base = "simulate --trials 20000 --workers 3 --seed 1 --config " + f;
  REQUIRE(run(base + " --out " + (t.path / "x.csv").string()).code == 0);
  REQUIRE(run(base + " --out " + (t.path / "y.csv").string()).code == 0);
  CHECK(t.read("x.csv") == t.read("y.csv"));
  CHECK(lines(t.read("x.csv")).size() == 4);
  const auto other = run("simulate --trials 20000 --workers 3 --seed 2 --config " + f);
  CHECK(other.out != t.read("x.csv"));
  const auto sym = run(base + " --mode symbol_level");
  REQUIRE(sym.code == 0);
  CHECK(sym.out != t.read("x.csv"));
}

TEST_CASE("exit codes") {
  TempDir t;
  auto j = scenario(0, 10);
  j["system"]["links"]["sd"]["mu"] = -1;
  CHECK(run("aser --config " + t.write("bad.json", j)).code == 2);
  j = scenario(0, 10);
  j["system"]["xi"] = 2;
  CHECK(run("power-opt --config " + t.write("bad2.json", j)).code == 2);
  {
    std::ofstream(t.path / "broken.json") << "{\"system\": ";
  }
  CHECK(run("aser --config " + (t.path / "broken.json").string()).code == 2);
  CHECK(run("aser").code == 2);
  CHECK(run("simulate --mode fast --config " + t.write("ok.json", scenario(0, 0))).code == 2);
  CHECK(run("specfun eval nosuch '{}'").code == 2);
  CHECK(run("specfun eval bounded_q '{\"x\": 1}'").code == 2);
  CHECK(run("specfun eval lauricella_fd '{\"a\":1,\"b\":[0.5],\"c\":2,\"x\":[0.999999999],\"method\":\"series\"}'").code ==
        3);
  CHECK(run("specfun eval lauricella_fd '{\"a\":1,\"b\":[0.5],\"c\":2,\"x\":[1.5],\"method\":\"series\"}'").code == 2);
}

TEST_CASE("specfun eval") {
  auto r = run("specfun eval lauricella_fd '{\"a\":1,\"b\":[0.5,0.5],\"c\":2,\"x\":[0,0]}'");
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
  r = run("specfun eval gaussian_q '{\"x\":0}'");
  CHECK(r.out == "0.5\n");
  r = run("specfun eval yacoub_y '{\"nu\":1.5,\"a\":0.3,\"b\":0}'");
  CHECK(r.out == "1\n");
  r = run("specfun list");
  CHECK(r.out.find("lauricella_phi1") != std::string::npos);
}

TEST_CASE("power-opt emits table rows") {
  const auto r = run("power-opt --workers 4 --config " + (kSource / "configs" / "power_table.json").string());
  REQUIRE(r.code == 0);
  const auto rows = json::parse(r.out);
  REQUIRE(rows.size() == 16);
  for (const auto& row : rows) {
    CAPTURE(row.at("label").get<std::string>());
    if (row.at("flags").empty()) CHECK(std::abs(row.at("deviation").get<double>()) < 1e-3);
  }
  CHECK(run("power-opt --direct-only --config " + (kSource / "configs" / "power_table.json").string()).code == 2);
}
