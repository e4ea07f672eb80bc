// SPDX-License-Identifier: Apache-2.0
//
// Data-driven scenario generation: k-means clustering of historical hours,
// elbow selection of k, and probability weighting by cluster size.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridplan/model.hpp"

namespace gridplan {

/// One row per historical hour. Columns are named `demand:<region>` or
/// `avail:<region>:<fuel>`.
struct ObservationMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> hours;  ///< hours since the Unix epoch, UTC
  std::vector<int> month;           ///< 1..12
  std::vector<int> hour_of_day;     ///< 0..23
  std::size_t dropped_rows = 0;     ///< hours dropped for missing values

  void append(std::int64_t hour, std::vector<double> values);
};

std::string demand_column(const std::string& region);
std::string availability_column(const std::string& region, const std::string& fuel);

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iters = 300;
  std::uint64_t seed = 0;
};

struct Clustering {
  std::size_t k = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;  ///< per input row, in input order
  std::vector<std::size_t> counts;
  std::vector<double> weights;
  double wcss = 0.0;
  /// wcss after every Lloyd iteration of the winning restart.
  std::vector<double> wcss_trace;
  /// Same, for every restart.
  std::vector<std::vector<double>> restart_traces;
};

/// Lloyd's algorithm with k-means++ seeding and restarts; the best restart by
/// wcss wins. Rows are put in a canonical order before seeding, so the result
/// does not depend on the input row order. Clusters are labelled in
/// lexicographic order of their centroids.
Clustering kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                  const KMeansOptions& options = {});

std::size_t count_distinct_rows(const std::vector<std::vector<double>>& points);

/// k in [2, k_max - 1] maximizing wcss(k-1) - 2 wcss(k) + wcss(k+1); ties go
/// to the smaller k. `profile[i]` is wcss(i + 1). Returns 1 when wcss(1) == 0.
std::size_t elbow_from_profile(const std::vector<double>& profile);

struct ElbowResult {
  std::size_t k = 1;
  std::vector<double> profile;
};

ElbowResult select_k_elbow(const std::vector<std::vector<double>>& points, std::size_t k_max = 10,
                           const KMeansOptions& options = {});

enum class Grouping { Month, MonthHour };

struct KPolicy {
  enum class Kind { Fixed, Elbow } kind = Kind::Fixed;
  std::size_t k = 4;  ///< cluster count for Fixed, k_max for Elbow

  static KPolicy fixed(std::size_t k) { return {Kind::Fixed, k}; }
  static KPolicy elbow(std::size_t k_max) { return {Kind::Elbow, k_max}; }
};

struct ScenarioSet {
  std::string group;
  std::size_t rows = 0;  ///< historical hours behind the set
  std::size_t k = 0;
  double wcss = 0.0;     ///< in standardized units
  std::vector<Scenario> scenarios;
};

struct SkippedGroup {
  std::string group;
  std::string reason;
};

struct ScenarioBuild {
  std::map<std::string, ScenarioSet> sets;
  std::vector<SkippedGroup> skipped;
};

std::string group_key(Grouping grouping, int month, int hour_of_day);

/// Clusters the joint (demand, availability) vector of each group after
/// z-score standardization; each centroid, mapped back to MWh, becomes one
/// scenario weighted by its cluster's share of rows.
ScenarioBuild build_scenarios(const ObservationMatrix& history, Grouping grouping,
                              const KPolicy& policy, const KMeansOptions& options = {});

}  // namespace gridplan
