// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "gridplan/error.hpp"
#include "gridplan/scenario_gen.hpp"

using namespace gridplan;
using doctest::Approx;
using Points = std::vector<std::vector<double>>;

namespace {

Points two_gaussians(std::uint64_t seed, std::size_t n = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 8.0);
  Points pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = i % 2 == 0 ? 0.0 : 100.0;
    pts.push_back({c + g(rng), c + g(rng)});
  }
  return pts;
}

double sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// wcss of an assignment with centroids recomputed from scratch.
double partition_wcss(const Points& pts, const std::vector<std::size_t>& assign, std::size_t k) {
  const std::size_t d = pts[0].size();
  Points mean(k, std::vector<double>(d, 0.0));
  std::vector<std::size_t> n(k, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ++n[assign[i]];
    for (std::size_t j = 0; j < d; ++j) mean[assign[i]][j] += pts[i][j];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (auto& v : mean[c]) v /= double(std::max<std::size_t>(n[c], 1));
  double w = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) w += sq(pts[i], mean[assign[i]]);
  return w;
}

void check_clustering_invariants(const Points& pts, const Clustering& c) {
  REQUIRE(c.centroids.size() == c.k);
  double wsum = 0.0, w = 0.0;
  for (std::size_t cl = 0; cl < c.k; ++cl) {
    CHECK(c.counts[cl] > 0);
    wsum += c.weights[cl];
    std::vector<double> mean(pts[0].size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (c.assignment[i] == cl)
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += pts[i][j] / double(c.counts[cl]);
    for (std::size_t j = 0; j < mean.size(); ++j)
      CHECK(std::abs(c.centroids[cl][j] - mean[j]) <= 1e-9 * std::max(1.0, std::abs(mean[j])));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) w += sq(pts[i], c.centroids[c.assignment[i]]);
  CHECK(wsum == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(c.wcss - w) <= 1e-6 * std::max(1.0, w));
}

std::int64_t hour_of(int y, unsigned m, unsigned d, int h) {
  using namespace std::chrono;
  return duration_cast<hours>(sys_days{year{y} / month{m} / day{d}}.time_since_epoch()).count() + h;
}

}  // namespace

TEST_CASE("k-means: perfectly separated 1-D points") {
  const Points pts{{0}, {0}, {10}, {10}};
  const auto c = kmeans(pts, 2, {.restarts = 3, .max_iters = 50, .seed = 1});
  CHECK(c.centroids[0][0] == Approx(0.0));
  CHECK(c.centroids[1][0] == Approx(10.0));
  CHECK(c.weights[0] == Approx(0.5));
  CHECK(c.weights[1] == Approx(0.5));
  CHECK(c.wcss == Approx(0.0));
}

TEST_CASE("k-means: one cluster is the mean") {
  const Points pts{{1}, {2}, {3}};
  const auto c = kmeans(pts, 1);
  CHECK(c.centroids[0][0] == Approx(2.0));
  CHECK(c.wcss == Approx(2.0));
}

TEST_CASE("k-means: too few distinct rows") {
  CHECK_THROWS_AS(kmeans({{1}, {1}, {1}}, 2), Error);
  CHECK_THROWS_AS(kmeans({{1}}, 0), Error);
  CHECK(count_distinct_rows({{1, 2}, {1, 2}, {2, 1}}) == 2);
}

TEST_CASE("k-means: two Gaussians") {
  const auto pts = two_gaussians(11);
  const auto c = kmeans(pts, 2, {.restarts = 10, .max_iters = 300, .seed = 5});
  check_clustering_invariants(pts, c);
  CHECK(std::sqrt(sq(c.centroids[0], {0, 0})) <= 5.0);
  CHECK(std::sqrt(sq(c.centroids[1], {100, 100})) <= 5.0);
  for (double w : c.weights) {
    CHECK(w >= 0.4);
    CHECK(w <= 0.6);
  }
  // No single-point move between the two clusters lowers wcss.
  const double base = partition_wcss(pts, c.assignment, 2);
  CHECK(base == Approx(c.wcss));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto moved = c.assignment;
    moved[i] = 1 - moved[i];
    CHECK(partition_wcss(pts, moved, 2) >= base - 1e-9);
  }
}

TEST_CASE("Lloyd iterations never raise wcss") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 50);
    Points pts(120, std::vector<double>(3));
    for (auto& p : pts)
      for (auto& v : p) v = u(rng);
    const auto c = kmeans(pts, 5, {.restarts = 4, .max_iters = 300, .seed = seed});
    check_clustering_invariants(pts, c);
    REQUIRE(c.restart_traces.size() == 4);
    for (const auto& trace : c.restart_traces)
      for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9 * trace[i - 1]);
    CHECK(c.wcss_trace.back() == Approx(c.wcss));
  }
}

TEST_CASE("k-means ignores the input row order") {
  const auto pts = two_gaussians(3, 90);
  auto shuffled = pts;
  std::mt19937_64 rng(99);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = kmeans(pts, 3, {.restarts = 5, .max_iters = 300, .seed = 2});
  const auto b = kmeans(shuffled, 3, {.restarts = 5, .max_iters = 300, .seed = 2});
  REQUIRE(a.k == b.k);
  for (std::size_t c = 0; c < a.k; ++c)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(a.centroids[c][j] - b.centroids[c][j]) <= 1e-9);
  CHECK(a.wcss == Approx(b.wcss));
}

TEST_CASE("k-means is deterministic for a seed") {
  const auto pts = two_gaussians(4, 80);
  const auto a = kmeans(pts, 4, {.restarts = 3, .max_iters = 300, .seed = 8});
  const auto b = kmeans(pts, 4, {.restarts = 3, .max_iters = 300, .seed = 8});
  CHECK(a.centroids == b.centroids);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("elbow from a stated profile") {
  CHECK(elbow_from_profile({100, 20, 18, 17, 16.5}) == 2);
  CHECK(elbow_from_profile({0, 0, 0}) == 1);
  // Ties go to the smaller k.
  CHECK(elbow_from_profile({30, 20, 10, 0}) == 2);
}

TEST_CASE("elbow on identical rows") {
  const Points pts(20, std::vector<double>{3.0, 4.0});
  CHECK(select_k_elbow(pts, 5).k == 1);
}

TEST_CASE("elbow recovers two Gaussians") {
  const auto r = select_k_elbow(two_gaussians(11), 6, {.restarts = 10, .max_iters = 300, .seed = 5});
  CHECK(r.k == 2);
  CHECK(r.profile.size() == 6);
  CHECK_THROWS_AS(select_k_elbow(two_gaussians(11), 2), Error);
}

TEST_CASE("group keys") {
  CHECK(group_key(Grouping::Month, 7, 0) == "m07");
  CHECK(group_key(Grouping::MonthHour, 12, 5) == "m12h05");
}

TEST_CASE("scenarios from identical rows") {
  ObservationMatrix m;
  m.columns = {demand_column("A"), demand_column("B")};
  for (int h = 0; h < 4; ++h) m.append(hour_of(2023, 3, 1, h), {40, 30});
  const auto out = build_scenarios(m, Grouping::Month, KPolicy::fixed(1));
  REQUIRE(out.sets.count("m03"));
  const auto& set = out.sets.at("m03");
  REQUIRE(set.scenarios.size() == 1);
  CHECK(set.scenarios[0].probability == 1.0);
  CHECK(set.scenarios[0].demand.at("A") == Approx(40.0));
  CHECK(set.scenarios[0].demand.at("B") == Approx(30.0));
}

TEST_CASE("scenarios: exact two-cluster split with counting weights") {
  ObservationMatrix m;
  m.columns = {demand_column("A"), demand_column("B")};
  m.append(hour_of(2023, 5, 2, 0), {40, 30});
  m.append(hour_of(2023, 5, 2, 1), {40, 50});
  m.append(hour_of(2023, 5, 2, 2), {40, 30});
  m.append(hour_of(2023, 5, 2, 3), {40, 30});
  const auto set = build_scenarios(m, Grouping::Month, KPolicy::fixed(2), {.restarts = 5, .max_iters = 100, .seed = 1})
                       .sets.at("m05");
  REQUIRE(set.scenarios.size() == 2);
  std::map<double, double> by_b;
  for (const auto& s : set.scenarios) {
    CHECK(s.demand.at("A") == Approx(40.0));
    by_b[s.demand.at("B")] = s.probability;
  }
  CHECK(by_b.at(30.0) == Approx(0.75));
  CHECK(by_b.at(50.0) == Approx(0.25));
}

TEST_CASE("scenarios: a year of sinusoidal demand, four per month") {
  ObservationMatrix m;
  m.columns = {demand_column("A"), demand_column("B"), availability_column("A", "SUN")};
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 2.0);
  const std::int64_t start = hour_of(2023, 1, 1, 0);
  for (std::int64_t h = 0; h < 8760; ++h) {
    const double t = 2.0 * M_PI * double(h % 24) / 24.0;
    const double season = std::sin(2.0 * M_PI * double(h) / 8760.0);
    m.append(start + h, {100 + 30 * season + 10 * std::sin(t) + noise(rng), 50 + 5 * std::cos(t) + noise(rng),
                         std::max(0.0, 20 * std::sin(t)) + std::abs(noise(rng))});
  }
  const auto out = build_scenarios(m, Grouping::Month, KPolicy::fixed(4), {.restarts = 3, .max_iters = 300, .seed = 7});
  CHECK(out.skipped.empty());
  REQUIRE(out.sets.size() == 12);
  for (const auto& [key, set] : out.sets) {
    CAPTURE(key);
    REQUIRE(set.scenarios.size() == 4);
    double total = 0.0;
    for (const auto& s : set.scenarios) {
      CHECK(s.probability > 0.0);
      total += s.probability;
      CHECK(s.demand.size() == 2);
      CHECK(s.vrrg_available.size() == 1);
      CHECK(s.vrrg_available.count({"A", "SUN"}) == 1);
      for (const auto& [r, d] : s.demand) CHECK(d >= 0.0);
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("scenarios: groups with too few rows are skipped") {
  ObservationMatrix m;
  m.columns = {demand_column("A")};
  for (int h = 0; h < 10; ++h) m.append(hour_of(2023, 1, 3, h), {double(h)});
  m.append(hour_of(2023, 2, 3, 0), {5});
  const auto out = build_scenarios(m, Grouping::Month, KPolicy::fixed(3));
  CHECK(out.sets.count("m01") == 1);
  REQUIRE(out.skipped.size() == 1);
  CHECK(out.skipped[0].group == "m02");
  CHECK_FALSE(out.skipped[0].reason.empty());
}

TEST_CASE("scenarios: month-by-hour grouping") {
  ObservationMatrix m;
  m.columns = {demand_column("A")};
  for (int d = 1; d <= 10; ++d)
    for (int h = 0; h < 24; ++h) m.append(hour_of(2023, 8, unsigned(d), h), {double(h * 10 + d)});
  const auto out = build_scenarios(m, Grouping::MonthHour, KPolicy::fixed(2));
  CHECK(out.sets.size() == 24);
  CHECK(out.sets.count("m08h13") == 1);
  CHECK(out.sets.at("m08h13").rows == 10);
}

TEST_CASE("scenarios: elbow policy") {
  ObservationMatrix m;
  m.columns = {demand_column("A"), demand_column("B")};
  const auto pts = two_gaussians(21, 200);
  for (std::size_t i = 0; i < pts.size(); ++i)
    m.append(hour_of(2023, 6, 1, 0) + std::int64_t(i), {pts[i][0] + 200, pts[i][1] + 200});
  const auto out = build_scenarios(m, Grouping::Month, KPolicy::elbow(6), {.restarts = 5, .max_iters = 300, .seed = 3});
  REQUIRE(out.sets.size() == 1);
  CHECK(out.sets.begin()->second.k == 2);
}
