// SPDX-License-Identifier: Apache-2.0
#include "gridplan/benders.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "gridplan/error.hpp"

namespace gridplan {

SubproblemResult solve_subproblem(const PlanningInstance& instance, std::size_t scenario,
                                  const std::vector<double>& fixed_plan, const LpOptions& options) {
  const auto compiled = build_subproblem(instance, scenario, fixed_plan);
  const auto sol = solve(compiled.lp, options);
  if (sol.status != LpStatus::Optimal)
    fail(ErrorKind::Solver, "subproblem for scenario '" + instance.scenarios[scenario].id +
                                "' ended " + to_string(sol.status));
  SubproblemResult out;
  out.scenario_id = instance.scenarios[scenario].id;
  out.cost = sol.objective;
  for (const auto row : compiled.layout.plan_fixing_rows) out.duals_plan.push_back(sol.duals[row]);
  out.second_stage = extract_solution(instance, compiled, sol);
  return out;
}

double Cut::evaluate(const std::vector<double>& plan) const {
  double v = constant;
  for (std::size_t l = 0; l < gradient.size(); ++l) v += gradient[l] * plan.at(l);
  return v;
}

Cut aggregate_cut(const std::vector<SubproblemResult>& results,
                  const std::vector<double>& probabilities,
                  const std::vector<double>& generating_plan) {
  if (results.size() != probabilities.size() || results.empty())
    fail(ErrorKind::Structural, "cut aggregation needs exactly one result per scenario");
  Cut cut;
  cut.gradient.assign(generating_plan.size(), 0.0);
  double expected = 0.0;
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (results[s].duals_plan.size() != generating_plan.size())
      fail(ErrorKind::Structural, "subproblem duals do not match the plan dimension");
    expected += probabilities[s] * results[s].cost;
    for (std::size_t l = 0; l < generating_plan.size(); ++l)
      cut.gradient[l] += probabilities[s] * results[s].duals_plan[l];
  }
  double slope_at_plan = 0.0;
  for (std::size_t l = 0; l < generating_plan.size(); ++l)
    slope_at_plan += cut.gradient[l] * generating_plan[l];
  cut.constant = expected - slope_at_plan;
  return cut;
}

MasterResult solve_master(const PlanningInstance& instance, const std::vector<Cut>& cuts,
                          double alpha_down, const LpOptions& options) {
  LinearProgram lp;
  std::vector<std::size_t> plan;
  for (const auto& l : instance.links)
    plan.push_back(lp.add_variable("plan[" + l.from + "," + l.to + "]", l.transfer_cost, 0.0, l.capacity));
  const std::size_t alpha = lp.add_variable("alpha", 1.0, alpha_down, kInfinity);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const auto& cut = cuts[k];
    if (cut.gradient.size() != plan.size())
      fail(ErrorKind::Structural, "cut dimension does not match the link count");
    std::vector<LpTerm> terms{{alpha, 1.0}};
    for (std::size_t l = 0; l < plan.size(); ++l)
      if (cut.gradient[l] != 0.0) terms.push_back({plan[l], -cut.gradient[l]});
    lp.add_row("cut" + std::to_string(k + 1), std::move(terms), Relation::GreaterEqual, cut.constant);
  }
  const auto sol = solve(lp, options);
  if (sol.status != LpStatus::Optimal)
    fail(ErrorKind::Solver, std::string("master problem ended ") + to_string(sol.status));
  MasterResult out;
  for (const auto j : plan) out.plan.push_back(std::clamp(sol.primal[j], lp.lower()[j], lp.upper()[j]));
  out.alpha = sol.primal[alpha];
  out.lower_bound = sol.objective;
  return out;
}

double relative_gap(double lower, double upper) {
  // Rounding can put the lower bound a hair above the upper one.
  return std::max(0.0, (upper - lower) / std::max(1.0, std::abs(upper)));
}

PlanEvaluation evaluate_plan(const PlanningInstance& instance, const std::vector<double>& plan,
                             const LpOptions& options, bool parallel) {
  PlanEvaluation ev;
  const std::size_t S = instance.scenarios.size();
  ev.results.resize(S);
  if (parallel && S > 1) {
    std::vector<std::future<SubproblemResult>> jobs;
    for (std::size_t s = 0; s < S; ++s)
      jobs.push_back(std::async(std::launch::async, [&, s] {
        return solve_subproblem(instance, s, plan, options);
      }));
    for (std::size_t s = 0; s < S; ++s) ev.results[s] = jobs[s].get();
  } else {
    for (std::size_t s = 0; s < S; ++s) ev.results[s] = solve_subproblem(instance, s, plan, options);
  }
  for (std::size_t l = 0; l < instance.links.size(); ++l)
    ev.first_stage += instance.links[l].transfer_cost * plan[l];
  // fixed summation order keeps serial and parallel runs bit-identical
  for (std::size_t s = 0; s < S; ++s) ev.expected_recourse += instance.scenarios[s].probability * ev.results[s].cost;
  return ev;
}

PlanningSolution assemble_solution(const PlanningInstance& instance, const std::vector<double>& plan,
                                   const PlanEvaluation& evaluation) {
  PlanningSolution out;
  for (std::size_t l = 0; l < instance.links.size(); ++l)
    out.planned_interchange[{instance.links[l].from, instance.links[l].to}] = plan[l];
  for (const auto& r : evaluation.results) {
    const auto& part = r.second_stage;
    out.production.insert(part.production.begin(), part.production.end());
    out.actual_interchange.insert(part.actual_interchange.begin(), part.actual_interchange.end());
    out.deviation.insert(part.deviation.begin(), part.deviation.end());
    out.shortage.insert(part.shortage.begin(), part.shortage.end());
    out.excess.insert(part.excess.begin(), part.excess.end());
  }
  out.objective_value = evaluation.total();
  return out;
}

BendersReport run_benders(const PlanningInstance& instance, const BendersOptions& options) {
  const auto validation = validate_instance(instance);
  if (!validation.ok())
    fail(ErrorKind::Validation, "invalid planning instance:\n" + validation.to_string());
  if (options.max_iterations == 0) fail(ErrorKind::Input, "max_iterations must be at least 1");

  std::vector<double> probabilities;
  for (const auto& s : instance.scenarios) probabilities.push_back(s.probability);

  BendersReport report;
  std::vector<Cut> cuts;
  // Initial master without cuts: alpha sits at alpha_down.
  MasterResult master = solve_master(instance, cuts, options.alpha_down, options.lp);
  double lower = master.lower_bound;
  double best_upper = kInfinity;
  PlanEvaluation best_eval;

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const std::vector<double> plan = master.plan;
    PlanEvaluation ev = evaluate_plan(instance, plan, options.lp, options.parallel);
    const double upper = ev.total();
    Cut cut = aggregate_cut(ev.results, probabilities, plan);
    if (upper < best_upper) {
      best_upper = upper;
      report.best_plan = plan;
      best_eval = std::move(ev);
    }
    cut.source_iteration = it;
    cuts.push_back(cut);

    master = solve_master(instance, cuts, options.alpha_down, options.lp);
    lower = std::max(lower, master.lower_bound);

    BendersIteration rec;
    rec.iteration = it;
    rec.plan = plan;
    rec.master_objective = master.lower_bound;
    rec.lower_bound = lower;
    rec.iteration_upper = upper;
    rec.upper_bound = best_upper;
    rec.gap = relative_gap(lower, best_upper);
    rec.cut = cut;
    report.iterations.push_back(rec);
    if (options.on_iteration) options.on_iteration(it, lower, best_upper, rec.gap);

    if (rec.gap <= options.rel_gap) {
      report.converged = true;
      break;
    }
  }

  report.gap = report.iterations.empty() ? kInfinity : report.iterations.back().gap;
  report.final_solution = assemble_solution(instance, report.best_plan, best_eval);
  return report;
}

}  // namespace gridplan
