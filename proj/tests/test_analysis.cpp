// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gridplan/analysis.hpp"
#include "gridplan/error.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace gridplan;
using doctest::Approx;

namespace {

double slack(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

PlanningInstance identical_scenarios() {
  auto in = testing::t1();
  in.scenarios[1].demand = in.scenarios[0].demand;
  return in;
}

PlanningInstance zero_demand_with_fixed() {
  auto in = testing::t1();
  in.fuels.push_back({"NUC", FuelCategory::Fixed});
  in.generators.push_back({"B", "NUC", FuelCategory::Fixed, 20, 12, 30});
  for (auto& s : in.scenarios)
    for (auto& [r, d] : s.demand) d = 0.0;
  return in;
}

AnalysisOptions benders() {
  AnalysisOptions o;
  o.method = SolveMethod::Benders;
  o.benders.rel_gap = 1e-9;
  return o;
}

}  // namespace

TEST_CASE("wait-and-see on T1") {
  const auto ws = wait_and_see(testing::t1());
  // Single-scenario grid oracle: plan = demand of B in each scenario.
  testing::TwoRegionCase s1, s2;
  s1.demand_a = {40};
  s1.demand_b = {30};
  s1.probability = {1};
  s2 = s1;
  s2.demand_b = {50};
  CHECK(testing::two_region_grid_oracle(s1).objective == Approx(3800.0));
  CHECK(testing::two_region_grid_oracle(s2).objective == Approx(5000.0));
  CHECK(ws.per_scenario.at("s1") == Approx(3800.0));
  CHECK(ws.per_scenario.at("s2") == Approx(5000.0));
  CHECK(ws.ws == Approx(4400.0));
}

TEST_CASE("mean-value problem on T1") {
  const auto mv = mean_value_cost(testing::t1());
  CHECK(mv.mean_instance.scenarios.size() == 1);
  CHECK(mv.mean_instance.scenarios[0].demand.at("B") == Approx(40.0));
  CHECK(mv.mean_plan[0] == Approx(40.0));
  CHECK(mv.ev == Approx(4400.0));
}

TEST_CASE("EVPI report on T1") {
  for (const auto& opts : {AnalysisOptions{}, benders()}) {
    const auto r = evpi(testing::t1(), opts);
    CHECK(r.rp == Approx(4550.0));
    CHECK(r.ws == Approx(4400.0));
    CHECK(r.ev == Approx(4400.0));
    CHECK(r.eev == Approx(9175.0));
    CHECK(r.evpi_standard == Approx(150.0));
    CHECK(r.evpi_paper == Approx(0.0));
  }
}

TEST_CASE("no uncertainty: every measure coincides") {
  for (const auto& in : {single_scenario(testing::t1(), 0), identical_scenarios()}) {
    const auto r = evpi(in);
    CHECK(r.ws == Approx(r.rp));
    CHECK(r.ev == Approx(r.rp));
    CHECK(r.eev == Approx(r.rp));
    CHECK(r.evpi_standard == Approx(0.0));
    CHECK(r.evpi_paper == Approx(0.0));
  }
}

TEST_CASE("zero demand: the mean-value problem pays only forced output") {
  const auto mv = mean_value_cost(zero_demand_with_fixed());
  CHECK(mv.ev == Approx(12.0 * 30.0));
}

TEST_CASE("ws <= rp <= eev on the corpus") {
  for (const auto& in : testing::corpus()) {
    const auto r = evpi(in);
    CHECK(r.ws <= r.rp + slack(r.rp));
    CHECK(r.rp <= r.eev + slack(r.eev));
    CHECK(r.evpi_standard >= -slack(r.rp));
    CHECK(r.evpi_standard == Approx(r.rp - r.ws));
    CHECK(r.evpi_paper == Approx(r.ws - r.ev));
  }
}

TEST_CASE("rp agrees between methods") {
  for (const auto& in : testing::corpus()) {
    const double a = solve_objective(in);
    const double b = solve_objective(in, benders());
    CHECK(std::abs(a - b) <= slack(a));
  }
}

TEST_CASE("capacity sensitivity on T1") {
  const auto entries = capacity_sensitivity(testing::t1(), 10.0);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].region == "A");
  CHECK(entries[0].applicable);
  CHECK(entries[0].fuel == "NG");
  CHECK(entries[0].saving >= 0.0);
  CHECK(entries[0].baseline_cost == Approx(4550.0));
  // B has no dispatchable fuel.
  CHECK(entries[1].region == "B");
  CHECK_FALSE(entries[1].applicable);
  CHECK_THROWS_AS(capacity_sensitivity(testing::t1(), 0.0), Error);
}

TEST_CASE("capacity sensitivity with slack capacity saves nothing") {
  for (const auto& e : capacity_sensitivity(testing::t1(), 1000.0))
    if (e.applicable) CHECK(e.saving == Approx(0.0));
  for (const auto& e : capacity_sensitivity(testing::one_region(10, 20), 1000.0)) CHECK(e.saving == Approx(0.0));
}

TEST_CASE("capacity sensitivity: the shortage region gains most") {
  const auto in = testing::shortage_three_region();
  const auto entries = capacity_sensitivity(in, 1000.0);
  REQUIRE(entries.size() == 3);
  double best_other = -1.0;
  for (const auto& e : entries) {
    REQUIRE(e.applicable);
    CHECK(e.saving >= -slack(e.baseline_cost));
    if (e.region != "Z") best_other = std::max(best_other, e.saving);
  }
  CHECK(entries[2].region == "Z");
  CHECK(entries[2].saving > best_other);
  // Shortage in Z is 80 (low) and 120 (high) MWh; each displaced MWh saves 10370 - 50.
  CHECK(entries[2].saving == Approx((0.4 * 80 + 0.6 * 120) * (10370.0 - 50.0)));
  // X's extra capacity goes to its cheapest dispatchable fuel.
  CHECK(entries[0].fuel == "COL");
}

TEST_CASE("capacity sensitivity honours a fuel override") {
  const auto entries = capacity_sensitivity(testing::shortage_three_region(), 100.0, {}, std::string("NG"));
  for (const auto& e : entries) CHECK(e.fuel == "NG");
}

TEST_CASE("capacity savings are nonnegative on random instances") {
  for (std::uint64_t seed = 600; seed < 610; ++seed)
    for (const auto& e : capacity_sensitivity(testing::random_instance(seed), 25.0))
      if (e.applicable) CHECK(e.saving >= -slack(e.baseline_cost));
}

TEST_CASE("transmission relaxation on T1 changes nothing") {
  const auto r = transmission_relaxation(testing::t1());
  CHECK(std::abs(r.unlimited.total - r.baseline.total) <= 1e-6);
  CHECK(r.capacity_bound == Approx(160.0));
  REQUIRE(r.per_link.size() == 1);
  CHECK(r.per_link[0].baseline == Approx(50.0));
}

TEST_CASE("transmission relaxation behind a binding link") {
  const auto r = transmission_relaxation(testing::binding_link());
  CHECK(r.unlimited.total < r.baseline.total - 1.0);
  CHECK(r.unlimited.shortage < r.baseline.shortage - 1.0);
  REQUIRE(r.per_link.size() == 1);
  CHECK(r.per_link[0].baseline == Approx(40.0));
  CHECK(r.per_link[0].delta > 0.0);
}

TEST_CASE("transmission relaxation with zero demand") {
  const auto r = transmission_relaxation(zero_demand_with_fixed());
  CHECK(r.baseline.total == Approx(360.0));
  CHECK(r.unlimited.total == Approx(360.0));
}

TEST_CASE("relaxation never costs more") {
  for (const auto& in : testing::corpus()) {
    const auto r = transmission_relaxation(in);
    CHECK(r.unlimited.total <= r.baseline.total + slack(r.baseline.total));
  }
}

TEST_CASE("summary statistics") {
  const auto one = summarize({7.0});
  CHECK(one.min == 7.0);
  CHECK(one.max == 7.0);
  CHECK(one.mean == 7.0);
  CHECK(one.median == 7.0);
  const auto three = summarize({30, 10, 20});
  CHECK(three.mean == Approx(20.0));
  CHECK(three.median == Approx(20.0));
  CHECK(three.min == 10.0);
  CHECK(three.max == 30.0);
  CHECK(summarize({1, 2, 3, 10}).median == Approx(2.5));
}

TEST_CASE("aggregate report") {
  std::vector<SliceResult> slices;
  const double scale[] = {1.0, 2.0, 3.0};
  for (int m = 0; m < 3; ++m) {
    SliceResult s;
    s.slice = "m0" + std::to_string(m + 6);
    s.month = m + 6;
    s.hours = 10;
    s.instance = testing::t1();
    for (auto& sc : s.instance.scenarios)
      for (auto& [r, d] : sc.demand) d *= scale[m] * 0.5;
    s.solution = solve_extensive(s.instance);
    s.costs = cost_breakdown(s.instance, s.solution);
    slices.push_back(std::move(s));
  }
  const auto rep = aggregate_report(slices);
  CHECK(rep.per_month.size() == 3);
  CHECK(rep.per_hour.empty());
  CHECK(rep.per_month.at(6).total == Approx(10.0 * slices[0].costs.total));
  double annual = 0.0;
  for (const auto& s : slices) annual += 10.0 * s.costs.total;
  CHECK(rep.annual.total == Approx(annual));
  const auto& total = rep.stats.at("total");
  CHECK(total.min == Approx(slices[0].costs.total));
  CHECK(total.max == Approx(slices[2].costs.total));
  // Region shares add up to the annual figure.
  double regional = 0.0;
  for (const auto& [r, c] : rep.per_region) regional += c.total();
  CHECK(regional == Approx(annual));
  CHECK_THROWS_AS(aggregate_report({}), Error);
}

TEST_CASE("region costs add up to the breakdown") {
  for (const auto& in : testing::corpus()) {
    const auto sol = solve_extensive(in);
    const auto c = cost_breakdown(in, sol);
    double sum = 0.0;
    for (const auto& [r, rc] : region_costs(in, sol)) sum += rc.total();
    CHECK(sum == Approx(c.total - c.excess));
  }
}

TEST_CASE("hour-of-day aggregation") {
  std::vector<SliceResult> slices;
  for (int h : {0, 13}) {
    SliceResult s;
    s.slice = "m07h" + std::string(h < 10 ? "0" : "") + std::to_string(h);
    s.month = 7;
    s.hour_of_day = h;
    s.hours = 31;
    s.instance = testing::t1();
    s.solution = solve_extensive(s.instance);
    s.costs = cost_breakdown(s.instance, s.solution);
    slices.push_back(std::move(s));
  }
  const auto rep = aggregate_report(slices);
  CHECK(rep.per_hour.size() == 2);
  CHECK(rep.per_hour.at(13).total == Approx(31 * 4550.0));
  CHECK(rep.per_month.at(7).total == Approx(62 * 4550.0));
}
