// SPDX-License-Identifier: Apache-2.0
#include "gridplan/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gridplan/error.hpp"

namespace gridplan {

PlanningSolution solve_instance(const PlanningInstance& instance, const AnalysisOptions& options) {
  if (options.method == SolveMethod::Extensive) return solve_extensive(instance, options.lp);
  auto bo = options.benders;
  bo.lp = options.lp;
  auto report = run_benders(instance, bo);
  if (!report.converged) fail(ErrorKind::Solver, "Benders did not converge");
  return std::move(report.final_solution);
}

double solve_objective(const PlanningInstance& instance, const AnalysisOptions& options) {
  return solve_instance(instance, options).objective_value;
}

WaitAndSee wait_and_see(const PlanningInstance& instance, const AnalysisOptions& options) {
  WaitAndSee out;
  for (std::size_t s = 0; s < instance.scenarios.size(); ++s) {
    const double v = solve_extensive(single_scenario(instance, s), options.lp).objective_value;
    out.per_scenario[instance.scenarios[s].id] = v;
    out.ws += instance.scenarios[s].probability * v;
  }
  return out;
}

Scenario mean_scenario(const PlanningInstance& instance) {
  Scenario mean;
  mean.id = "mean";
  mean.probability = 1.0;
  for (const auto& sc : instance.scenarios) {
    for (const auto& [r, d] : sc.demand) mean.demand[r] += sc.probability * d;
    for (const auto& [k, v] : sc.vrrg_available) mean.vrrg_available[k] += sc.probability * v;
  }
  return mean;
}

MeanValue mean_value_cost(const PlanningInstance& instance, const AnalysisOptions& options) {
  MeanValue out;
  out.mean_instance = instance;
  out.mean_instance.scenarios = {mean_scenario(instance)};
  const auto sol = solve_extensive(out.mean_instance, options.lp);
  out.ev = sol.objective_value;
  for (const auto& l : instance.links) out.mean_plan.push_back(sol.planned_interchange.at({l.from, l.to}));
  return out;
}

EvpiReport evpi(const PlanningInstance& instance, const AnalysisOptions& options) {
  EvpiReport rep;
  rep.rp = solve_objective(instance, options);
  const auto ws = wait_and_see(instance, options);
  rep.ws = ws.ws;
  rep.per_scenario = ws.per_scenario;
  const auto mv = mean_value_cost(instance, options);
  rep.ev = mv.ev;
  rep.mean_plan = mv.mean_plan;
  rep.eev = evaluate_plan(instance, mv.mean_plan, options.lp).total();
  rep.evpi_standard = rep.rp - rep.ws;
  rep.evpi_paper = rep.ws - rep.ev;
  return rep;
}

std::vector<SensitivityEntry> capacity_sensitivity(const PlanningInstance& instance, double delta,
                                                   const AnalysisOptions& options,
                                                   const std::optional<std::string>& fuel_override) {
  if (!(delta > 0.0) || !std::isfinite(delta)) fail(ErrorKind::Input, "capacity delta must be positive");
  const double baseline = solve_objective(instance, options);
  std::vector<SensitivityEntry> out;
  for (const auto& region : instance.regions) {
    SensitivityEntry e;
    e.region = region;
    e.baseline_cost = baseline;
    std::optional<std::size_t> pick;
    for (std::size_t g = 0; g < instance.generators.size(); ++g) {
      const auto& gen = instance.generators[g];
      if (gen.region != region || gen.category != FuelCategory::Dispatchable) continue;
      if (fuel_override) {
        if (gen.fuel == *fuel_override) pick = g;
        continue;
      }
      if (!pick || gen.production_cost < instance.generators[*pick].production_cost) pick = g;
    }
    if (!pick) {
      out.push_back(e);
      continue;
    }
    PlanningInstance expanded = instance;
    auto& gen = expanded.generators[*pick];
    gen.rated_power += delta;
    gen.available_power += delta;
    e.applicable = true;
    e.fuel = gen.fuel;
    e.expanded_cost = solve_objective(expanded, options);
    e.saving = baseline - e.expanded_cost;
    out.push_back(e);
  }
  return out;
}

double unlimited_capacity_bound(const PlanningInstance& instance) {
  double total = 0.0;
  for (const auto& sc : instance.scenarios)
    for (const auto& [_, d] : sc.demand) total += d;
  return total;
}

TransmissionRelaxation transmission_relaxation(const PlanningInstance& instance, const AnalysisOptions& options) {
  TransmissionRelaxation out;
  const auto base = solve_instance(instance, options);
  out.baseline = cost_breakdown(instance, base);

  PlanningInstance relaxed = instance;
  out.capacity_bound = unlimited_capacity_bound(instance);
  for (auto& l : relaxed.links) l.capacity = std::max(l.capacity, out.capacity_bound);
  const auto open = solve_instance(relaxed, options);
  out.unlimited = cost_breakdown(relaxed, open);

  for (const auto& l : instance.links) {
    LinkFlowDelta d;
    d.from = l.from;
    d.to = l.to;
    d.baseline = base.planned_interchange.at({l.from, l.to});
    d.unlimited = open.planned_interchange.at({l.from, l.to});
    d.delta = d.unlimited - d.baseline;
    out.per_link.push_back(d);
  }
  return out;
}

CategoryStats summarize(std::vector<double> values) {
  CategoryStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

std::map<std::string, RegionCosts> region_costs(const PlanningInstance& in, const PlanningSolution& sol) {
  std::map<std::string, RegionCosts> out;
  for (const auto& r : in.regions) out[r];
  for (const auto& l : in.links) {
    auto it = sol.planned_interchange.find({l.from, l.to});
    if (it != sol.planned_interchange.end()) out[l.from].transfer += l.transfer_cost * it->second;
  }
  for (const auto& sc : in.scenarios) {
    const double p = sc.probability;
    for (const auto& g : in.generators) {
      auto it = sol.production.find({g.region, g.fuel, sc.id});
      if (it != sol.production.end()) out[g.region].generation += p * g.production_cost * it->second;
    }
    for (const auto& l : in.links) {
      auto it = sol.deviation.find({l.from, l.to, sc.id});
      if (it != sol.deviation.end()) out[l.from].deviation_penalty += p * l.deviation_penalty * it->second;
    }
    for (const auto& r : in.regions) {
      auto it = sol.shortage.find({r, sc.id});
      if (it != sol.shortage.end()) out[r].shortage += p * in.shortage_cost.at(r) * it->second;
    }
  }
  return out;
}

namespace {

void accumulate(CostBreakdown& into, const CostBreakdown& c, double w) {
  into.generation += w * c.generation;
  into.transfer += w * c.transfer;
  into.shortage += w * c.shortage;
  into.deviation_penalty += w * c.deviation_penalty;
  into.excess += w * c.excess;
  into.total += w * c.total;
}

}  // namespace

AggregateReport aggregate_report(const std::vector<SliceResult>& slices) {
  if (slices.empty()) fail(ErrorKind::Input, "aggregate_report needs at least one slice");
  AggregateReport rep;
  std::map<std::string, std::vector<double>> columns;
  for (const auto& s : slices) {
    columns["generation"].push_back(s.costs.generation);
    columns["transfer"].push_back(s.costs.transfer);
    columns["shortage"].push_back(s.costs.shortage);
    columns["deviation_penalty"].push_back(s.costs.deviation_penalty);
    columns["total"].push_back(s.costs.total);
    if (s.month) accumulate(rep.per_month[*s.month], s.costs, s.hours);
    if (s.hour_of_day) accumulate(rep.per_hour[*s.hour_of_day], s.costs, s.hours);
    accumulate(rep.annual, s.costs, s.hours);
    for (const auto& [region, c] : region_costs(s.instance, s.solution)) {
      auto& acc = rep.per_region[region];
      acc.generation += s.hours * c.generation;
      acc.transfer += s.hours * c.transfer;
      acc.shortage += s.hours * c.shortage;
      acc.deviation_penalty += s.hours * c.deviation_penalty;
    }
  }
  for (auto& [name, values] : columns) rep.stats[name] = summarize(std::move(values));
  return rep;
}

}  // namespace gridplan
