// SPDX-License-Identifier: Apache-2.0
//
// Planning-problem data model and its compilation to a linear program.
//
// One planning step is one hour: power quantities are MWh per step and costs
// are $/MWh throughout.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gridplan/lp.hpp"

namespace gridplan {

enum class FuelCategory { Fixed, Dispatchable, Variable };

const char* to_string(FuelCategory category);
FuelCategory parse_fuel_category(const std::string& text);

struct Fuel {
  std::string id;
  FuelCategory category = FuelCategory::Dispatchable;
  bool operator==(const Fuel&) const = default;
};

struct GeneratorSpec {
  std::string region;
  std::string fuel;
  FuelCategory category = FuelCategory::Dispatchable;
  double rated_power = 0.0;
  /// Mandated output for Fixed fuels, resource limit for Dispatchable ones.
  /// Unused for Variable fuels, whose availability is per scenario.
  double available_power = 0.0;
  double production_cost = 0.0;
  bool operator==(const GeneratorSpec&) const = default;
};

struct TransmissionLink {
  std::string from;
  std::string to;
  double capacity = 0.0;
  double transfer_cost = 0.0;
  double deviation_penalty = 0.0;
  bool operator==(const TransmissionLink&) const = default;
};

/// Link endpoints as an ordered pair.
using LinkKey = std::pair<std::string, std::string>;
/// (region, fuel)
using GenKey = std::pair<std::string, std::string>;

struct Scenario {
  std::string id;
  double probability = 0.0;
  std::map<std::string, double> demand;
  std::map<GenKey, double> vrrg_available;
  bool operator==(const Scenario&) const = default;
};

struct PlanningInstance {
  std::vector<std::string> regions;
  std::vector<Fuel> fuels;
  std::vector<GeneratorSpec> generators;
  std::vector<TransmissionLink> links;
  std::vector<Scenario> scenarios;
  std::map<std::string, double> shortage_cost;
  /// When set, every link's deviation_penalty is kappa_trans * transfer_cost.
  std::optional<double> kappa_trans;
  /// Cost on excess energy. Zero reproduces the original model.
  double excess_penalty = 0.0;

  bool operator==(const PlanningInstance&) const = default;

  const Fuel* find_fuel(const std::string& id) const;
  const GeneratorSpec* find_generator(const std::string& region, const std::string& fuel) const;
};

/// Recomputes every deviation penalty from kappa_trans (no-op when unset).
void apply_kappa(PlanningInstance& instance);

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_instance(const PlanningInstance& instance);

/// Index of every LP column and block of rows the compiler emits, so callers
/// can decode solutions and patch right-hand sides without string lookups.
struct LpLayout {
  struct ScenarioBlock {
    std::size_t scenario = 0;             ///< index into instance.scenarios
    std::vector<std::size_t> production;  ///< per generator
    std::vector<std::size_t> actual;      ///< per link
    std::vector<std::size_t> deviation;   ///< per link
    std::vector<std::size_t> shortage;    ///< per region
    std::vector<std::size_t> excess;      ///< per region
    std::vector<std::size_t> balance_rows;  ///< per region
  };
  std::vector<std::size_t> plan;  ///< per link
  std::vector<ScenarioBlock> scenarios;
  /// Subproblem form only: rows pinning plan[l] to a fixed value.
  std::vector<std::size_t> plan_fixing_rows;
};

struct CompiledLp {
  LinearProgram lp;
  LpLayout layout;
};

/// Extensive form: first-stage transfer cost charged once, second-stage
/// terms weighted by scenario probability.
CompiledLp build_extensive_form(const PlanningInstance& instance);

/// Second-stage problem for one scenario with the plan pinned by equality
/// rows. Unweighted: the objective is the scenario's own cost.
CompiledLp build_subproblem(const PlanningInstance& instance, std::size_t scenario,
                            const std::vector<double>& fixed_plan);

struct PlanningSolution {
  /// Keyed by (region, fuel, scenario).
  std::map<std::tuple<std::string, std::string, std::string>, double> production;
  std::map<LinkKey, double> planned_interchange;
  /// Keyed by (from, to, scenario).
  std::map<std::tuple<std::string, std::string, std::string>, double> actual_interchange;
  std::map<std::tuple<std::string, std::string, std::string>, double> deviation;
  std::map<std::pair<std::string, std::string>, double> shortage;  ///< (region, scenario)
  std::map<std::pair<std::string, std::string>, double> excess;    ///< (region, scenario)
  double objective_value = 0.0;
};

PlanningSolution extract_solution(const PlanningInstance& instance, const CompiledLp& compiled,
                                  const LpSolution& lp_solution);

struct CostBreakdown {
  double generation = 0.0;
  double transfer = 0.0;
  double shortage = 0.0;
  double deviation_penalty = 0.0;
  double excess = 0.0;  ///< nonzero only with an excess penalty configured
  double total = 0.0;
};

CostBreakdown cost_breakdown(const PlanningInstance& instance, const PlanningSolution& solution);

/// Largest |balance residual| over (region, scenario).
double max_balance_residual(const PlanningInstance& instance, const PlanningSolution& solution);

/// Extensive-form solve; throws Error(Solver) unless the LP is optimal.
PlanningSolution solve_extensive(const PlanningInstance& instance, const LpOptions& options = {});

/// Copy of `instance` keeping only scenario `s`, with probability 1.
PlanningInstance single_scenario(const PlanningInstance& instance, std::size_t s);

}  // namespace gridplan
