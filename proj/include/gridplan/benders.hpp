// SPDX-License-Identifier: Apache-2.0
//
// Scenario-based Benders decomposition (L-shaped method) with a single
// aggregated optimality cut per iteration. The planned interchange is the
// complicating first-stage decision; every scenario gets its own subproblem.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gridplan/model.hpp"

namespace gridplan {

struct SubproblemResult {
  std::string scenario_id;
  /// Optimal second-stage cost of the scenario, not probability weighted.
  double cost = 0.0;
  /// Duals of the plan-fixing rows, indexed like instance.links.
  std::vector<double> duals_plan;
  /// Second-stage point of this scenario; planned_interchange holds the plan.
  PlanningSolution second_stage;
};

SubproblemResult solve_subproblem(const PlanningInstance& instance, std::size_t scenario,
                                  const std::vector<double>& fixed_plan,
                                  const LpOptions& options = {});

/// alpha >= constant + <gradient, plan>
struct Cut {
  double constant = 0.0;
  std::vector<double> gradient;  ///< indexed like instance.links
  std::size_t source_iteration = 0;

  double evaluate(const std::vector<double>& plan) const;
};

Cut aggregate_cut(const std::vector<SubproblemResult>& results,
                  const std::vector<double>& probabilities,
                  const std::vector<double>& generating_plan);

struct MasterResult {
  std::vector<double> plan;
  double alpha = 0.0;
  double lower_bound = 0.0;  ///< master objective
};

MasterResult solve_master(const PlanningInstance& instance, const std::vector<Cut>& cuts,
                          double alpha_down, const LpOptions& options = {});

struct BendersOptions {
  std::size_t max_iterations = 200;
  double rel_gap = 1e-6;
  /// Valid lower bound on the expected recourse: every second-stage cost is
  /// nonnegative, so zero works for any valid instance.
  double alpha_down = 0.0;
  /// Solve the per-scenario subproblems on separate threads. Results are
  /// identical to the serial path.
  bool parallel = false;
  LpOptions lp;
  /// Called after each iteration (for tracing).
  std::function<void(std::size_t iteration, double lower, double upper, double gap)> on_iteration;
};

struct BendersIteration {
  std::size_t iteration = 0;
  std::vector<double> plan;       ///< plan evaluated by the subproblems
  double master_objective = 0.0;  ///< master optimum after adding this cut
  double lower_bound = 0.0;       ///< best lower bound so far
  double iteration_upper = 0.0;   ///< first-stage + expected recourse at `plan`
  double upper_bound = 0.0;       ///< best upper bound so far
  double gap = 0.0;
  Cut cut;
};

struct BendersReport {
  std::vector<BendersIteration> iterations;
  std::vector<double> best_plan;
  PlanningSolution final_solution;
  bool converged = false;
  double gap = 0.0;
  double objective() const { return final_solution.objective_value; }
};

/// max(0, (best_upper - lower) / max(1, |best_upper|))
double relative_gap(double lower, double upper);

BendersReport run_benders(const PlanningInstance& instance, const BendersOptions& options = {});

/// First-stage cost plus expected recourse of a fixed plan, together with the
/// subproblem results that produced it.
struct PlanEvaluation {
  double first_stage = 0.0;
  double expected_recourse = 0.0;
  double total() const { return first_stage + expected_recourse; }
  std::vector<SubproblemResult> results;
};

PlanEvaluation evaluate_plan(const PlanningInstance& instance, const std::vector<double>& plan,
                             const LpOptions& options = {}, bool parallel = false);

/// Combines a plan and its per-scenario subproblem points into one solution.
PlanningSolution assemble_solution(const PlanningInstance& instance, const std::vector<double>& plan,
                                   const PlanEvaluation& evaluation);

}  // namespace gridplan
