// SPDX-License-Identifier: Apache-2.0
//
// Policy experiments on planning instances: value of perfect information,
// capacity sensitivity, transmission relaxation and cost statistics.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/benders.hpp"
#include "gridplan/model.hpp"

namespace gridplan {

enum class SolveMethod { Benders, Extensive };

struct AnalysisOptions {
  SolveMethod method = SolveMethod::Extensive;
  BendersOptions benders;
  LpOptions lp;
};

/// Optimal objective of the stochastic program by the chosen method.
double solve_objective(const PlanningInstance& instance, const AnalysisOptions& options = {});
PlanningSolution solve_instance(const PlanningInstance& instance, const AnalysisOptions& options = {});

struct WaitAndSee {
  double ws = 0.0;
  std::map<std::string, double> per_scenario;
};

WaitAndSee wait_and_see(const PlanningInstance& instance, const AnalysisOptions& options = {});

struct MeanValue {
  double ev = 0.0;
  std::vector<double> mean_plan;  ///< indexed like instance.links
  PlanningInstance mean_instance;
};

/// Probability-weighted mean of demand and variable availability.
Scenario mean_scenario(const PlanningInstance& instance);
MeanValue mean_value_cost(const PlanningInstance& instance, const AnalysisOptions& options = {});

struct EvpiReport {
  double rp = 0.0;   ///< recourse problem (stochastic optimum)
  double ws = 0.0;   ///< wait-and-see, expected value under perfect information
  double ev = 0.0;   ///< mean-value problem optimum
  double eev = 0.0;  ///< expected cost of the mean-value plan
  double evpi_standard = 0.0;  ///< rp - ws
  double evpi_paper = 0.0;     ///< ws - ev, no guaranteed sign
  std::map<std::string, double> per_scenario;
  std::vector<double> mean_plan;
};

EvpiReport evpi(const PlanningInstance& instance, const AnalysisOptions& options = {});

struct SensitivityEntry {
  std::string region;
  bool applicable = false;
  std::string fuel;  ///< fuel that received the extra capacity
  double baseline_cost = 0.0;
  double expanded_cost = 0.0;
  double saving = 0.0;
};

/// For each region, adds `delta` MWh to the cheapest Dispatchable generator
/// there (rated and available power in lockstep) and re-solves. `fuel_override`
/// forces a specific fuel where the region has it.
std::vector<SensitivityEntry> capacity_sensitivity(const PlanningInstance& instance, double delta = 1000.0,
                                                   const AnalysisOptions& options = {},
                                                   const std::optional<std::string>& fuel_override = {});

struct LinkFlowDelta {
  std::string from, to;
  double baseline = 0.0;
  double unlimited = 0.0;
  double delta = 0.0;
};

struct TransmissionRelaxation {
  CostBreakdown baseline;
  CostBreakdown unlimited;
  double capacity_bound = 0.0;  ///< capacity assigned to every link
  std::vector<LinkFlowDelta> per_link;
};

/// Total demand over all regions and scenarios: no single link can usefully
/// carry more than this in any scenario.
double unlimited_capacity_bound(const PlanningInstance& instance);

TransmissionRelaxation transmission_relaxation(const PlanningInstance& instance,
                                               const AnalysisOptions& options = {});

/// One solved slice for aggregation.
struct SliceResult {
  std::string slice;
  std::optional<int> month;
  std::optional<int> hour_of_day;
  double hours = 1.0;  ///< historical hours the slice stands for
  PlanningInstance instance;
  PlanningSolution solution;
  CostBreakdown costs;
};

struct CategoryStats {
  double min = 0.0, max = 0.0, mean = 0.0, median = 0.0;
};

struct RegionCosts {
  double generation = 0.0, transfer = 0.0, shortage = 0.0, deviation_penalty = 0.0;
  double total() const { return generation + transfer + shortage + deviation_penalty; }
};

struct AggregateReport {
  /// Per-step cost statistics across slices, keyed by category name.
  std::map<std::string, CategoryStats> stats;
  /// Slice cost x hours, summed per month.
  std::map<int, CostBreakdown> per_month;
  std::map<int, CostBreakdown> per_hour;
  std::map<std::string, RegionCosts> per_region;
  CostBreakdown annual;
};

CategoryStats summarize(std::vector<double> values);
std::map<std::string, RegionCosts> region_costs(const PlanningInstance& instance, const PlanningSolution& solution);
AggregateReport aggregate_report(const std::vector<SliceResult>& slices);

}  // namespace gridplan
