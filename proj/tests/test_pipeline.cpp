// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gridplan/error.hpp"
#include "gridplan/json_io.hpp"
#include "gridplan/pipeline.hpp"
#include "support/instances.hpp"

using namespace gridplan;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("gridplan_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Captured {
  int code = 0;
  std::vector<std::string> out, err;
  bool out_has(const std::string& needle) const {
    for (const auto& l : out)
      if (l.find(needle) != std::string::npos) return true;
    return false;
  }
  bool err_has(const std::string& needle) const {
    for (const auto& l : err)
      if (l.find(needle) != std::string::npos) return true;
    return false;
  }
};

Captured run(const std::string& cmd, const fs::path& config, RunFlags flags = {}) {
  Captured c;
  if (flags.timestamp.empty()) flags.deterministic_names = true;
  c.code = run_command(
      cmd, config, flags, [&](const std::string& l) { c.out.push_back(l); },
      [&](const std::string& l) { c.err.push_back(l); });
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Instance-mode workspace with the given instances and solver section.
fs::path instance_workspace(const fs::path& dir, const std::map<std::string, PlanningInstance>& instances,
                            const Json& solver = {{"method", "benders"}, {"rel_gap", 1e-9}, {"max_iterations", 50}},
                            const Json& analysis = {{"sensitivity_delta", 10}}) {
  Json names = Json::object();
  for (const auto& [name, in] : instances) {
    write_json_file(dir / (name + ".json"), to_json(in));
    names[name] = name + ".json";
  }
  const auto cfg = dir / "run.json";
  write_json_file(cfg, Json{{"instances", names}, {"output_dir", "out"}, {"solver", solver}, {"analysis", analysis}});
  return cfg;
}

}  // namespace

TEST_CASE("instance JSON round trip") {
  for (const auto& in : testing::corpus()) CHECK(instance_from_json(Json::parse(to_json(in).dump())) == in);
}

TEST_CASE("instance JSON is strict") {
  auto doc = to_json(testing::t1());
  doc["regoins"] = Json::array();
  CHECK_THROWS_AS(instance_from_json(doc), Error);
  doc = to_json(testing::t1());
  doc["fuels"][0]["category"] = "nuclear";
  CHECK_THROWS_AS(instance_from_json(doc), Error);
}

TEST_CASE("instance JSON: scalar shortage cost and derived penalties") {
  auto doc = to_json(testing::t1());
  doc["shortage_cost"] = 1000;
  doc["kappa_trans"] = 0.5;
  for (auto& l : doc["links"]) l.erase("deviation_penalty");
  const auto in = instance_from_json(doc);
  CHECK(in.shortage_cost.at("A") == 1000.0);
  CHECK(in.shortage_cost.at("B") == 1000.0);
  CHECK(in.links[0].deviation_penalty == 5.0);
  doc["links"][0]["deviation_penalty"] = 7;
  CHECK_THROWS_AS(instance_from_json(doc), Error);
}

TEST_CASE("solution and scenario-set JSON round trip") {
  const auto sol = solve_extensive(testing::t1());
  const auto back = solution_from_json(Json::parse(to_json(sol).dump()));
  CHECK(back.planned_interchange == sol.planned_interchange);
  CHECK(back.production == sol.production);
  CHECK(back.objective_value == sol.objective_value);
  ScenarioSet set{"m07", 10, 2, 1.5, testing::t1().scenarios};
  const auto set_back = scenario_set_from_json(Json::parse(to_json(set).dump()));
  CHECK(set_back.scenarios == set.scenarios);
  CHECK(set_back.group == "m07");
}

TEST_CASE("run config is strict") {
  const fs::path base = "/tmp";
  CHECK_NOTHROW(parse_run_config(Json{{"instances", {{"a", "a.json"}}}}, base));
  CHECK_THROWS_AS(parse_run_config(Json{{"instances", {{"a", "a.json"}}}, {"outptu_dir", "x"}}, base), Error);
  CHECK_THROWS_AS(parse_run_config(Json{{"instances", {{"a", "a.json"}}}, {"solver", {{"gap", 1}}}}, base), Error);
  CHECK_THROWS_AS(parse_run_config(Json{{"instances", {{"a", "a.json"}}}, {"solver", {{"method", "simplex"}}}}, base),
                  Error);
  // Clustering runs need a seed.
  CHECK_THROWS_AS(parse_run_config(Json{{"data", {"g.csv"}}, {"cost_config", "c.json"}}, base), Error);
  CHECK_NOTHROW(parse_run_config(
      Json{{"data", {"g.csv"}}, {"cost_config", "c.json"}, {"scenario", {{"seed", 1}}}}, base));
  // Exactly one source of slices.
  CHECK_THROWS_AS(parse_run_config(Json::object(), base), Error);
  const auto c = parse_run_config(Json{{"instances", {{"a", "a.json"}}}, {"output_dir", "res"}}, base);
  CHECK(c.instances.at("a") == base / "a.json");
  CHECK(c.method == SolveMethod::Benders);
}

TEST_CASE("artifact names") {
  RunFlags f;
  f.timestamp = "20260101T000000Z";
  CHECK(artifact_name("solve", "t1", "json", f) == "solve_t1_20260101T000000Z.json");
  f.deterministic_names = true;
  CHECK(artifact_name("solve", "t1", "csv", f) == "solve_t1.csv");
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::Io) == 1);
  CHECK(exit_code(ErrorKind::Validation) == 2);
  CHECK(exit_code(ErrorKind::Input) == 2);
  CHECK(exit_code(ErrorKind::Structural) == 2);
  CHECK(exit_code(ErrorKind::Solver) == 3);
}

TEST_CASE("validate") {
  TempDir tmp;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}});
  const auto ok = run("validate", cfg);
  CHECK(ok.code == 0);
  CHECK(ok.out_has("ok t1"));

  auto bad = testing::t1();
  bad.scenarios[0].probability = bad.scenarios[1].probability = 0.6;
  TempDir tmp2;
  const auto r = run("validate", instance_workspace(tmp2.path, {{"t1", testing::t1()}, {"tilted", bad}}));
  CHECK(r.code == 2);
  CHECK(r.err_has("tilted"));
  CHECK(r.err_has("probabilities sum to 1.2"));
}

TEST_CASE("I/O failures exit 1") {
  TempDir tmp;
  CHECK(run("validate", tmp.path / "absent.json").code == 1);
  const auto cfg = tmp.path / "run.json";
  write_json_file(cfg, Json{{"instances", {{"x", "missing.json"}}}});
  CHECK(run("validate", cfg).code == 1);
  write_json_file(cfg, Json{{"data", {"missing.csv"}}, {"cost_config", "c.json"}, {"scenario", {{"seed", 1}}}});
  CHECK(run("validate", cfg).code == 1);
}

TEST_CASE("bad configuration exits 2") {
  TempDir tmp;
  const auto cfg = tmp.path / "run.json";
  write_json_file(cfg, Json{{"instances", {{"x", "x.json"}}}, {"typo", 1}});
  const auto r = run("validate", cfg);
  CHECK(r.code == 2);
  CHECK(r.err_has("typo"));
  CHECK(run("frobnicate", instance_workspace(tmp.path, {{"t1", testing::t1()}})).code == 2);
}

TEST_CASE("solve T1 by both methods") {
  TempDir tmp;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}});
  RunFlags flags;
  flags.trace = true;
  flags.deterministic_names = true;
  const auto r = run("solve", cfg, flags);
  REQUIRE(r.code == 0);
  CHECK(r.out_has("t1 objective=4550"));
  const auto out = tmp.path / "out";
  CHECK(fs::exists(out / "solve_t1.csv"));
  CHECK(r.out_has((out / "solve_t1.csv").string()));
  const auto doc = read_json_file(out / "solve_t1.json");
  CHECK(doc["meta"]["objective"].get<double>() == Approx(4550.0));
  CHECK(doc["cost_breakdown"]["deviation_penalty"].get<double>() == Approx(50.0));
  const auto bend = read_json_file(out / "benders_t1.json");
  CHECK(bend["converged"].get<bool>());

  // Trace lines: lower bounds never drop.
  double last = -1e300;
  std::size_t traces = 0;
  for (const auto& l : r.out) {
    if (l.rfind("trace t1 ", 0) != 0) continue;
    std::istringstream is(l.substr(9));
    std::size_t it;
    double lower, upper, gap;
    is >> it >> lower >> upper >> gap;
    CHECK(lower >= last - 1e-9);
    last = lower;
    ++traces;
  }
  CHECK(traces == bend["iterations"].size());

  TempDir tmp2;
  const auto r2 = run("solve", instance_workspace(tmp2.path, {{"t1", testing::t1()}}, {{"method", "extensive"}}));
  REQUIRE(r2.code == 0);
  const auto doc2 = read_json_file(tmp2.path / "out" / "solve_t1.json");
  CHECK(doc2["meta"]["objective"].get<double>() == Approx(doc["meta"]["objective"].get<double>()).epsilon(1e-6));
  CHECK_FALSE(fs::exists(tmp2.path / "out" / "benders_t1.json"));
}

TEST_CASE("non-convergence exits 3 and keeps the trace") {
  TempDir tmp;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}}, {{"method", "benders"}, {"max_iterations", 1}});
  const auto r = run("solve", cfg);
  CHECK(r.code == 3);
  CHECK(fs::exists(tmp.path / "out" / "benders_t1.json"));
}

TEST_CASE("evpi and sensitivity on T1") {
  TempDir tmp;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}});
  REQUIRE(run("evpi", cfg).code == 0);
  const auto e = read_json_file(tmp.path / "out" / "evpi_t1.json");
  CHECK(e["ws"].get<double>() == Approx(4400.0));
  CHECK(e["rp"].get<double>() == Approx(4550.0));
  CHECK(e["evpi_standard"].get<double>() == Approx(150.0));

  REQUIRE(run("sensitivity", cfg).code == 0);
  const auto s = read_json_file(tmp.path / "out" / "sensitivity_t1.json");
  for (const auto& c : s["capacity"])
    if (c["applicable"].get<bool>()) CHECK(c["saving"].get<double>() >= -1e-6);
  CHECK(s["transmission"]["saving"].get<double>() == Approx(0.0).epsilon(1e-6));

  TempDir off;
  const auto r = run("evpi", instance_workspace(off.path, {{"t1", testing::t1()}}, {{"method", "extensive"}},
                                                {{"evpi", false}}));
  CHECK(r.code == 0);
  CHECK(r.out_has("disabled"));
  CHECK_FALSE(fs::exists(off.path / "out" / "evpi_t1.json"));
}

TEST_CASE("report aggregates the latest solves") {
  TempDir tmp;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}, {"binding", testing::binding_link()}});
  REQUIRE(run("solve", cfg).code == 0);
  const auto r = run("report", cfg);
  REQUIRE(r.code == 0);
  const auto stats = read_json_file(tmp.path / "out" / "report_stats.json");
  CHECK(stats.dump().find("total") != std::string::npos);
  CHECK(fs::exists(tmp.path / "out" / "report_regions.csv"));
  // Without solves there is nothing to report.
  TempDir empty;
  CHECK(run("report", instance_workspace(empty.path, {{"t1", testing::t1()}})).code != 0);
}

TEST_CASE("output directory override") {
  TempDir tmp, elsewhere;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}}, {{"method", "extensive"}});
  ::setenv(kOutputDirEnv, elsewhere.path.c_str(), 1);
  const auto r = run("solve", cfg);
  ::unsetenv(kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(elsewhere.path / "solve_t1.json"));
  CHECK_FALSE(fs::exists(tmp.path / "out"));
}

TEST_CASE("timestamped names") {
  TempDir tmp;
  const auto cfg = instance_workspace(tmp.path, {{"t1", testing::t1()}}, {{"method", "extensive"}});
  RunFlags f;
  f.timestamp = "20260102T030405Z";
  REQUIRE(run("solve", cfg, f).code == 0);
  CHECK(fs::exists(tmp.path / "out" / "solve_t1_20260102T030405Z.json"));
}

TEST_CASE("jobs do not change the artifacts") {
  std::map<std::string, PlanningInstance> many;
  for (std::uint64_t s = 0; s < 4; ++s) many["r" + std::to_string(s)] = testing::random_instance(700 + s);
  TempDir a, b;
  RunFlags serial, parallel;
  serial.deterministic_names = parallel.deterministic_names = true;
  parallel.jobs = 3;
  const auto ra = run("solve", instance_workspace(a.path, many), serial);
  const auto rb = run("solve", instance_workspace(b.path, many), parallel);
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  for (const auto& [name, _] : many)
    CHECK(slurp(a.path / "out" / ("solve_" + name + ".json")) == slurp(b.path / "out" / ("solve_" + name + ".json")));
  // Summary lines keep the configured order.
  std::vector<std::string> la, lb;
  for (const auto& l : ra.out)
    if (l.find("objective=") != std::string::npos) la.push_back(l);
  for (const auto& l : rb.out)
    if (l.find("objective=") != std::string::npos) lb.push_back(l);
  CHECK(la == lb);
}
