#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "fixture_graphs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(TAMMES_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tammes_cli_" + std::to_string(::getpid())) / name;
  fs::create_directories(dir);
  return dir;
}

std::vector<json> records(const fs::path& p) {
  std::vector<json> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(json::parse(l));
  return out;
}

}  // namespace

TEST_CASE("enumerate is byte-identical across runs") {
  const auto dir = scratch("enum");
  REQUIRE(run("enumerate --n 7 --generate --out " + (dir / "a.ndjson").string()) == 0);
  REQUIRE(run("enumerate --n 7 --generate --out " + (dir / "b.ndjson").string()) == 0);
  CHECK(slurp(dir / "a.ndjson") == slurp(dir / "b.ndjson"));
  CHECK(!slurp(dir / "a.ndjson").empty());
  CHECK(fs::exists(dir / "a.ndjson.meta.json"));
}

TEST_CASE("empty planar_code stream") {
  const auto dir = scratch("empty");
  {
    std::ofstream f(dir / "empty.pc", std::ios::binary);
    f << ">>planar_code<<";
  }
  CHECK(run("enumerate --n 8 --planar-code " + (dir / "empty.pc").string() + " --out " +
            (dir / "out.ndjson").string()) == 0);
  CHECK(slurp(dir / "out.ndjson").empty());
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(run("") == 1);
  CHECK(run("enumerate --n 7 --out " + (dir / "x").string()) == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("report --in " + (dir / "missing.ndjson").string()) == 2);
  {
    std::ofstream f(dir / "bad.pc", std::ios::binary);
    f << "garbage";
  }
  CHECK(run("enumerate --n 8 --planar-code " + (dir / "bad.pc").string() + " --out " + (dir / "y").string()) == 2);
  {
    std::ofstream f(dir / "bad.ndjson");
    f << "{\"schema\":\"nope\"}\n";
  }
  CHECK(run("prune --in " + (dir / "bad.ndjson").string() + " --out " + (dir / "z").string() +
            " --d-window 1.0,1.1") == 2);
}

TEST_CASE("verify-maximal on fixtures") {
  const auto dir = scratch("verify");
  const auto out = dir / "v.ndjson";
  REQUIRE(run("verify-maximal --planar-code " + fixtures::path("gamma14_3.pc") + " --config " +
              fixtures::path("p14.json") + " --out " + out.string()) == 0);
  auto recs = records(out);
  REQUIRE(recs.size() == 1u);
  CHECK(recs[0]["method"] == "stress_lp");
  CHECK(recs[0]["verdict"] == "rejected");

  REQUIRE(run("verify-maximal --planar-code " + fixtures::path("gamma14_0.pc") + " --config " +
              fixtures::path("p14.json") + " --out " + out.string()) == 0);
  recs = records(out);
  REQUIRE(recs.size() == 1u);
  CHECK(recs[0]["verdict"] == "maximal_candidate");

  CHECK(run("verify-maximal --planar-code " + fixtures::path("gamma14_0.pc") + " --config " +
            (dir / "none.json").string() + " --out " + out.string()) == 2);
}

TEST_CASE("optimize writes a configuration") {
  const auto dir = scratch("opt");
  REQUIRE(run("optimize --n 8 --restarts 5 --seed 3 --out " + (dir / "c.json").string() + " --csv " +
              (dir / "trace.csv").string()) == 0);
  const auto j = json::parse(slurp(dir / "c.json"));
  CHECK(j["n"] == 8);
  CHECK(j["points"].size() == 8u);
  CHECK(std::abs(j["psi_rad"].get<double>() - 1.3065271617174) < 1e-6);
  CHECK(slurp(dir / "trace.csv").rfind("restart,psi,best_psi\n", 0) == 0);
}

TEST_CASE("seven-point pipeline end to end") {
  const auto dir = scratch("pipe7");
  REQUIRE(run("pipeline --n 7 --generate --restarts 8 --out-dir " + dir.string()) == 0);
  for (const char* f : {"optimum.json", "graphs.ndjson", "pruned.ndjson", "embedded.ndjson", "verified.ndjson",
                        "report.csv", "verified.ndjson.meta.json"})
    CHECK(fs::exists(dir / f));
  int candidates = 0;
  const auto in = records(dir / "graphs.ndjson"), out = records(dir / "verified.ndjson");
  CHECK(in.size() == out.size());
  for (const auto& r : out) candidates += r["status"] == "maximal_candidate" ? 1 : 0;
  CHECK(candidates == 1);
}

TEST_CASE("gamma14 writes the fixture variants") {
  const auto dir = scratch("g14") / "nested";
  REQUIRE(run("gamma14 --config " + fixtures::path("p14.json") + " --out-dir " + dir.string()) == 0);
  for (const char* k : {"0", "1", "2", "3", "3b", "4"}) {
    const std::string f = std::string("gamma14_") + k + ".pc";
    CHECK(slurp(dir / f) == slurp(fixtures::path(f)));
  }
}
