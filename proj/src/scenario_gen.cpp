// SPDX-License-Identifier: Apache-2.0
#include "gridplan/scenario_gen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "gridplan/error.hpp"

namespace gridplan {

namespace {

using Point = std::vector<double>;

double sq_dist(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

// Uniform in [0, 1) from the top 53 bits, independent of the standard
// library's distribution implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> canonical_order(const std::vector<Point>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  return order;
}

struct Run {
  std::vector<Point> centroids;
  std::vector<std::size_t> assign;
  double wcss = 0.0;
  std::vector<double> trace;
};

void recompute_means(const std::vector<Point>& pts, const std::vector<std::size_t>& assign,
                     std::size_t k, std::vector<Point>& centroids, std::vector<std::size_t>& counts) {
  const std::size_t dim = pts.front().size();
  centroids.assign(k, Point(dim, 0.0));
  counts.assign(k, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ++counts[assign[i]];
    for (std::size_t d = 0; d < dim; ++d) centroids[assign[i]][d] += pts[i][d];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c])
      for (auto& v : centroids[c]) v /= static_cast<double>(counts[c]);
}

double total_wcss(const std::vector<Point>& pts, const std::vector<std::size_t>& assign,
                  const std::vector<Point>& centroids) {
  double w = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) w += sq_dist(pts[i], centroids[assign[i]]);
  return w;
}

Run lloyd(const std::vector<Point>& pts, std::size_t k, std::size_t max_iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = pts.size();

  // k-means++ seeding
  Run run;
  run.centroids.push_back(pts[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(pts[i], run.centroids[0]);
  while (run.centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    double target = uniform01(rng) * total;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      pick = i;
      if (target < d2[i]) break;
      target -= d2[i];
    }
    run.centroids.push_back(pts[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(pts[i], run.centroids.back()));
  }

  run.assign.assign(n, k);
  std::vector<std::size_t> counts;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(pts[i], run.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sq_dist(pts[i], run.centroids[c]);
        if (d < best_d) best_d = d, best = c;
      }
      if (run.assign[i] != best) run.assign[i] = best, changed = true;
    }
    if (!changed) break;
    recompute_means(pts, run.assign, k, run.centroids, counts);
    // Empty clusters take the point farthest from its own centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c]) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[run.assign[i]] < 2) continue;
        const double d = sq_dist(pts[i], run.centroids[run.assign[i]]);
        if (d > far_d) far_d = d, far = i;
      }
      if (far == n) fail(ErrorKind::Input, "k-means could not repair an empty cluster");
      run.assign[far] = c;
      recompute_means(pts, run.assign, k, run.centroids, counts);
    }
    run.trace.push_back(total_wcss(pts, run.assign, run.centroids));
  }
  recompute_means(pts, run.assign, k, run.centroids, counts);
  run.wcss = total_wcss(pts, run.assign, run.centroids);
  return run;
}

}  // namespace

void ObservationMatrix::append(std::int64_t hour, std::vector<double> values) {
  using namespace std::chrono;
  const sys_days day{days{hour >= 0 ? hour / 24 : (hour - 23) / 24}};
  const year_month_day ymd{day};
  hours.push_back(hour);
  month.push_back(static_cast<int>(static_cast<unsigned>(ymd.month())));
  hour_of_day.push_back(static_cast<int>(((hour % 24) + 24) % 24));
  rows.push_back(std::move(values));
}

std::string demand_column(const std::string& region) { return "demand:" + region; }

std::string availability_column(const std::string& region, const std::string& fuel) {
  return "avail:" + region + ":" + fuel;
}

std::size_t count_distinct_rows(const std::vector<std::vector<double>>& points) {
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Clustering kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                  const KMeansOptions& options) {
  if (k == 0) fail(ErrorKind::Input, "k must be at least 1");
  if (points.empty()) fail(ErrorKind::Input, "no points to cluster");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) fail(ErrorKind::Input, "points have inconsistent dimension");
    for (double v : p)
      if (!std::isfinite(v)) fail(ErrorKind::Input, "points contain non-finite values");
  }
  const std::size_t distinct = count_distinct_rows(points);
  if (distinct < k)
    fail(ErrorKind::Input, "only " + std::to_string(distinct) + " distinct rows for k = " + std::to_string(k));

  const auto order = canonical_order(points);
  std::vector<Point> pts;
  pts.reserve(points.size());
  for (auto i : order) pts.push_back(points[i]);

  Clustering out;
  Run best;
  bool have = false;
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    Run run = lloyd(pts, k, options.max_iters, options.seed + r);
    out.restart_traces.push_back(run.trace);
    if (!have || run.wcss < best.wcss) {
      best = std::move(run);
      have = true;
    }
  }

  // Relabel clusters by centroid order.
  std::vector<std::size_t> label(k);
  std::iota(label.begin(), label.end(), 0);
  std::sort(label.begin(), label.end(),
            [&](std::size_t a, std::size_t b) { return best.centroids[a] < best.centroids[b]; });
  std::vector<std::size_t> rank(k);
  for (std::size_t r = 0; r < k; ++r) rank[label[r]] = r;

  out.k = k;
  out.assignment.assign(points.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) out.assignment[order[i]] = rank[best.assign[i]];
  for (std::size_t r = 0; r < k; ++r) out.centroids.push_back(best.centroids[label[r]]);
  out.counts.assign(k, 0);
  for (auto a : out.assignment) ++out.counts[a];
  for (auto c : out.counts) out.weights.push_back(static_cast<double>(c) / static_cast<double>(points.size()));
  out.wcss = best.wcss;
  out.wcss_trace = std::move(best.trace);
  return out;
}

std::size_t elbow_from_profile(const std::vector<double>& profile) {
  if (profile.empty() || profile[0] <= 0.0) return 1;
  std::size_t best = 1;
  double best_score = -kInfinity;
  // profile[i] is wcss(i + 1); k ranges over 2..k_max-1
  for (std::size_t k = 2; k + 1 <= profile.size(); ++k) {
    const double score = profile[k - 2] - 2.0 * profile[k - 1] + profile[k];
    if (score > best_score) best_score = score, best = k;
  }
  return best;
}

ElbowResult select_k_elbow(const std::vector<std::vector<double>>& points, std::size_t k_max,
                           const KMeansOptions& options) {
  if (k_max < 3) fail(ErrorKind::Input, "k_max must be at least 3");
  ElbowResult out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    out.profile.push_back(kmeans(points, k, options).wcss);
    if (k == 1 && out.profile[0] <= 0.0) break;
  }
  out.k = elbow_from_profile(out.profile);
  return out;
}

std::string group_key(Grouping grouping, int month, int hour_of_day) {
  char buf[16];
  if (grouping == Grouping::Month) std::snprintf(buf, sizeof buf, "m%02d", month);
  else std::snprintf(buf, sizeof buf, "m%02dh%02d", month, hour_of_day);
  return buf;
}

ScenarioBuild build_scenarios(const ObservationMatrix& history, Grouping grouping,
                              const KPolicy& policy, const KMeansOptions& options) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < history.rows.size(); ++i)
    groups[group_key(grouping, history.month[i], history.hour_of_day[i])].push_back(i);

  // Column roles
  struct Role {
    bool demand;
    std::string region, fuel;
  };
  std::vector<Role> roles;
  for (const auto& col : history.columns) {
    if (col.rfind("demand:", 0) == 0) {
      roles.push_back({true, col.substr(7), {}});
    } else if (col.rfind("avail:", 0) == 0) {
      const auto rest = col.substr(6);
      const auto colon = rest.rfind(':');
      if (colon == std::string::npos) fail(ErrorKind::Input, "malformed column '" + col + "'");
      roles.push_back({false, rest.substr(0, colon), rest.substr(colon + 1)});
    } else {
      fail(ErrorKind::Input, "unrecognised observation column '" + col + "'");
    }
  }

  ScenarioBuild out;
  for (const auto& [key, members] : groups) {
    std::vector<Point> raw;
    for (auto i : members) raw.push_back(history.rows[i]);
    const std::size_t dim = history.columns.size();
    const std::size_t distinct = count_distinct_rows(raw);

    std::size_t k = policy.k;
    if (policy.kind == KPolicy::Kind::Fixed) {
      if (raw.size() < k || distinct < k) {
        out.skipped.push_back({key, "group has " + std::to_string(raw.size()) + " rows (" +
                                        std::to_string(distinct) + " distinct), needs " + std::to_string(k)});
        continue;
      }
    }

    // z-score standardization; constant columns map to zero.
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    for (const auto& p : raw)
      for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
    for (auto& m : mean) m /= static_cast<double>(raw.size());
    for (const auto& p : raw)
      for (std::size_t d = 0; d < dim; ++d) sd[d] += (p[d] - mean[d]) * (p[d] - mean[d]);
    for (auto& s : sd) s = std::sqrt(s / static_cast<double>(raw.size()));
    std::vector<Point> z = raw;
    for (auto& p : z)
      for (std::size_t d = 0; d < dim; ++d) p[d] = sd[d] > 0.0 ? (p[d] - mean[d]) / sd[d] : 0.0;

    if (policy.kind == KPolicy::Kind::Elbow) {
      const std::size_t k_max = std::min(policy.k, count_distinct_rows(z));
      k = k_max >= 3 ? select_k_elbow(z, k_max, options).k : std::max<std::size_t>(1, k_max);
    }
    const Clustering cl = kmeans(z, k, options);

    // Centroids in MWh: means of the original rows of each cluster.
    std::vector<Point> centroids(k, Point(dim, 0.0));
    for (std::size_t i = 0; i < raw.size(); ++i)
      for (std::size_t d = 0; d < dim; ++d) centroids[cl.assignment[i]][d] += raw[i][d];
    for (std::size_t c = 0; c < k; ++c)
      for (auto& v : centroids[c]) v /= static_cast<double>(cl.counts[c]);

    ScenarioSet set;
    set.group = key;
    set.rows = raw.size();
    set.k = k;
    set.wcss = cl.wcss;
    for (std::size_t c = 0; c < k; ++c) {
      Scenario sc;
      sc.id = key + "-s" + std::to_string(c + 1);
      sc.probability = cl.weights[c];
      for (std::size_t d = 0; d < dim; ++d) {
        const double v = std::max(0.0, centroids[c][d]);
        if (roles[d].demand) sc.demand[roles[d].region] = v;
        else sc.vrrg_available[{roles[d].region, roles[d].fuel}] = v;
      }
      set.scenarios.push_back(std::move(sc));
    }
    out.sets.emplace(key, std::move(set));
  }
  return out;
}

}  // namespace gridplan
