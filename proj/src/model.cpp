// SPDX-License-Identifier: Apache-2.0
#include "gridplan/model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "gridplan/error.hpp"

namespace gridplan {

const char* to_string(FuelCategory category) {
  switch (category) {
    case FuelCategory::Fixed: return "fixed";
    case FuelCategory::Dispatchable: return "dispatchable";
    case FuelCategory::Variable: return "variable";
  }
  return "?";
}

FuelCategory parse_fuel_category(const std::string& text) {
  if (text == "fixed") return FuelCategory::Fixed;
  if (text == "dispatchable") return FuelCategory::Dispatchable;
  if (text == "variable") return FuelCategory::Variable;
  fail(ErrorKind::Input, "unknown fuel category '" + text + "'");
}

const Fuel* PlanningInstance::find_fuel(const std::string& id) const {
  for (const auto& f : fuels)
    if (f.id == id) return &f;
  return nullptr;
}

const GeneratorSpec* PlanningInstance::find_generator(const std::string& region,
                                                      const std::string& fuel) const {
  for (const auto& g : generators)
    if (g.region == region && g.fuel == fuel) return &g;
  return nullptr;
}

void apply_kappa(PlanningInstance& instance) {
  if (!instance.kappa_trans) return;
  for (auto& link : instance.links) link.deviation_penalty = *instance.kappa_trans * link.transfer_cost;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations) out << v.field << ": " << v.message << '\n';
  return out.str();
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

bool bad_nonneg(double v) { return !std::isfinite(v) || v < 0.0; }

}  // namespace

ValidationReport validate_instance(const PlanningInstance& in) {
  ValidationReport rep;
  auto add = [&](std::string field, std::string msg) {
    rep.violations.push_back({std::move(field), std::move(msg)});
  };

  std::set<std::string> regions;
  for (const auto& r : in.regions)
    if (!regions.insert(r).second) add("regions", "duplicate region '" + r + "'");
  if (in.regions.empty()) add("regions", "no regions");

  std::set<std::string> fuels;
  for (const auto& f : in.fuels)
    if (!fuels.insert(f.id).second) add("fuels", "duplicate fuel '" + f.id + "'");

  std::set<GenKey> gens;
  for (std::size_t i = 0; i < in.generators.size(); ++i) {
    const auto& g = in.generators[i];
    const std::string field = "generators[" + std::to_string(i) + "]";
    if (!regions.count(g.region)) add(field + ".region", "unknown region '" + g.region + "'");
    const Fuel* fuel = in.find_fuel(g.fuel);
    if (!fuel) add(field + ".fuel", "unknown fuel '" + g.fuel + "'");
    else if (fuel->category != g.category)
      add(field + ".category", "category disagrees with fuel '" + g.fuel + "'");
    if (!gens.insert({g.region, g.fuel}).second)
      add(field, "duplicate generator for (" + g.region + ", " + g.fuel + ")");
    if (bad_nonneg(g.rated_power)) add(field + ".rated_power", "must be finite and >= 0");
    if (bad_nonneg(g.available_power)) add(field + ".available_power", "must be finite and >= 0");
    if (bad_nonneg(g.production_cost)) add(field + ".production_cost", "must be finite and >= 0");
    if (g.category != FuelCategory::Variable && g.available_power > g.rated_power)
      add(field + ".available_power",
          "available_power " + num(g.available_power) + " exceeds rated_power " +
              num(g.rated_power) + " (capacity row conflicts with the " +
              (g.category == FuelCategory::Fixed ? "fixed-output equality" : "availability limit") + ")");
  }

  std::set<LinkKey> links;
  for (std::size_t i = 0; i < in.links.size(); ++i) {
    const auto& l = in.links[i];
    const std::string field = "links[" + std::to_string(i) + "]";
    if (!regions.count(l.from)) add(field + ".from", "unknown region '" + l.from + "'");
    if (!regions.count(l.to)) add(field + ".to", "unknown region '" + l.to + "'");
    if (l.from == l.to) add(field, "self-link on '" + l.from + "'");
    if (!links.insert({l.from, l.to}).second)
      add(field, "duplicate link " + l.from + "->" + l.to);
    if (bad_nonneg(l.capacity)) add(field + ".capacity", "must be finite and >= 0");
    if (bad_nonneg(l.transfer_cost)) add(field + ".transfer_cost", "must be finite and >= 0");
    if (bad_nonneg(l.deviation_penalty)) add(field + ".deviation_penalty", "must be finite and >= 0");
    if (in.kappa_trans && l.deviation_penalty != *in.kappa_trans * l.transfer_cost)
      add(field + ".deviation_penalty", "differs from kappa_trans * transfer_cost");
  }
  if (in.kappa_trans && bad_nonneg(*in.kappa_trans)) add("kappa_trans", "must be finite and >= 0");

  for (const auto& r : in.regions) {
    auto it = in.shortage_cost.find(r);
    if (it == in.shortage_cost.end()) add("shortage_cost", "missing for region '" + r + "'");
    else if (bad_nonneg(it->second)) add("shortage_cost." + r, "must be finite and >= 0");
  }
  for (const auto& [r, _] : in.shortage_cost)
    if (!regions.count(r)) add("shortage_cost", "unknown region '" + r + "'");
  if (bad_nonneg(in.excess_penalty)) add("excess_penalty", "must be finite and >= 0");

  std::set<GenKey> vrrg_keys;
  for (const auto& g : in.generators)
    if (g.category == FuelCategory::Variable) vrrg_keys.insert({g.region, g.fuel});

  if (in.scenarios.empty()) add("scenarios", "no scenarios");
  double total = 0.0;
  std::set<std::string> ids;
  for (std::size_t s = 0; s < in.scenarios.size(); ++s) {
    const auto& sc = in.scenarios[s];
    const std::string field = "scenarios[" + sc.id + "]";
    if (!ids.insert(sc.id).second) add(field, "duplicate scenario id");
    if (!std::isfinite(sc.probability) || sc.probability <= 0.0 || sc.probability > 1.0)
      add(field + ".probability", "must lie in (0, 1]");
    total += sc.probability;
    for (const auto& r : in.regions) {
      auto it = sc.demand.find(r);
      if (it == sc.demand.end()) add(field + ".demand", "missing region '" + r + "'");
      else if (bad_nonneg(it->second)) add(field + ".demand." + r, "must be finite and >= 0");
    }
    for (const auto& [r, _] : sc.demand)
      if (!regions.count(r)) add(field + ".demand", "unknown region '" + r + "'");
    for (const auto& key : vrrg_keys) {
      auto it = sc.vrrg_available.find(key);
      if (it == sc.vrrg_available.end())
        add(field + ".vrrg_available", "missing (" + key.first + ", " + key.second + ")");
      else if (bad_nonneg(it->second))
        add(field + ".vrrg_available", "(" + key.first + ", " + key.second + ") must be finite and >= 0");
    }
    for (const auto& [key, _] : sc.vrrg_available)
      if (!vrrg_keys.count(key))
        add(field + ".vrrg_available",
            "(" + key.first + ", " + key.second + ") is not a variable-fuel generator");
  }
  if (!in.scenarios.empty() && std::abs(total - 1.0) > 1e-9)
    add("scenarios", "probabilities sum to " + num(total));
  return rep;
}

namespace {

void require_valid(const PlanningInstance& instance) {
  const auto rep = validate_instance(instance);
  if (!rep.ok()) fail(ErrorKind::Validation, "invalid planning instance:\n" + rep.to_string());
}

// Appends the second-stage block of scenario `s`, with objective weight
// `weight`, linking interchange to the given plan columns.
LpLayout::ScenarioBlock append_second_stage(LinearProgram& lp, const PlanningInstance& in,
                                            std::size_t s, double weight,
                                            const std::vector<std::size_t>& plan) {
  const auto& sc = in.scenarios[s];
  const std::string tag = "," + sc.id + "]";
  LpLayout::ScenarioBlock blk;
  blk.scenario = s;

  for (const auto& g : in.generators)
    blk.production.push_back(lp.add_variable("prod[" + g.region + "," + g.fuel + tag,
                                             weight * g.production_cost));
  for (const auto& l : in.links)
    blk.actual.push_back(lp.add_variable("actual[" + l.from + "," + l.to + tag, 0.0));
  for (const auto& l : in.links)
    blk.deviation.push_back(
        lp.add_variable("dev[" + l.from + "," + l.to + tag, weight * l.deviation_penalty));
  for (const auto& r : in.regions)
    blk.shortage.push_back(lp.add_variable("short[" + r + tag, weight * in.shortage_cost.at(r)));
  for (const auto& r : in.regions)
    blk.excess.push_back(lp.add_variable("excess[" + r + tag, weight * in.excess_penalty));

  for (std::size_t g = 0; g < in.generators.size(); ++g) {
    const auto& gen = in.generators[g];
    const std::string key = gen.region + "," + gen.fuel + tag;
    const std::size_t p = blk.production[g];
    lp.add_row("cap[" + key, {{p, 1.0}}, Relation::LessEqual, gen.rated_power);
    switch (gen.category) {
      case FuelCategory::Fixed:
        lp.add_row("fixed[" + key, {{p, 1.0}}, Relation::Equal, gen.available_power);
        break;
      case FuelCategory::Dispatchable:
        lp.add_row("avail[" + key, {{p, 1.0}}, Relation::LessEqual, gen.available_power);
        break;
      case FuelCategory::Variable:
        lp.add_row("vavail[" + key, {{p, 1.0}}, Relation::LessEqual,
                   sc.vrrg_available.at({gen.region, gen.fuel}));
        break;
    }
  }
  for (std::size_t l = 0; l < in.links.size(); ++l) {
    const auto& link = in.links[l];
    const std::string key = link.from + "," + link.to + tag;
    // actual flow i->j is bounded by the plan for i->j
    lp.add_row("flow[" + key, {{blk.actual[l], 1.0}, {plan[l], -1.0}}, Relation::LessEqual, 0.0);
    lp.add_row("devdef[" + key, {{blk.deviation[l], 1.0}, {plan[l], -1.0}, {blk.actual[l], 1.0}},
               Relation::Equal, 0.0);
  }
  for (std::size_t r = 0; r < in.regions.size(); ++r) {
    std::vector<LpTerm> terms;
    for (std::size_t g = 0; g < in.generators.size(); ++g)
      if (in.generators[g].region == in.regions[r]) terms.push_back({blk.production[g], 1.0});
    for (std::size_t l = 0; l < in.links.size(); ++l) {
      if (in.links[l].from == in.regions[r]) terms.push_back({blk.actual[l], -1.0});
      if (in.links[l].to == in.regions[r]) terms.push_back({blk.actual[l], 1.0});
    }
    terms.push_back({blk.shortage[r], 1.0});
    terms.push_back({blk.excess[r], -1.0});
    blk.balance_rows.push_back(lp.add_row("balance[" + in.regions[r] + tag, std::move(terms),
                                          Relation::Equal, sc.demand.at(in.regions[r])));
  }
  return blk;
}

}  // namespace

CompiledLp build_extensive_form(const PlanningInstance& instance) {
  require_valid(instance);
  CompiledLp out;
  for (const auto& l : instance.links)
    out.layout.plan.push_back(out.lp.add_variable("plan[" + l.from + "," + l.to + "]", l.transfer_cost));
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    const auto& link = instance.links[l];
    out.lp.add_row("plancap[" + link.from + "," + link.to + "]", {{out.layout.plan[l], 1.0}},
                   Relation::LessEqual, link.capacity);
  }
  for (std::size_t s = 0; s < instance.scenarios.size(); ++s)
    out.layout.scenarios.push_back(append_second_stage(
        out.lp, instance, s, instance.scenarios[s].probability, out.layout.plan));
  return out;
}

CompiledLp build_subproblem(const PlanningInstance& instance, std::size_t scenario,
                            const std::vector<double>& fixed_plan) {
  if (scenario >= instance.scenarios.size())
    fail(ErrorKind::Structural, "scenario index out of range");
  if (fixed_plan.size() != instance.links.size())
    fail(ErrorKind::Structural, "fixed plan size does not match the link count");
  CompiledLp out;
  for (const auto& l : instance.links)
    out.layout.plan.push_back(out.lp.add_variable("plan[" + l.from + "," + l.to + "]", 0.0));
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    const auto& link = instance.links[l];
    out.layout.plan_fixing_rows.push_back(out.lp.add_row("fix[" + link.from + "," + link.to + "]",
                                                         {{out.layout.plan[l], 1.0}},
                                                         Relation::Equal, fixed_plan[l]));
  }
  out.layout.scenarios.push_back(append_second_stage(out.lp, instance, scenario, 1.0, out.layout.plan));
  return out;
}

PlanningSolution extract_solution(const PlanningInstance& in, const CompiledLp& compiled,
                                  const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal)
    fail(ErrorKind::Structural, std::string("cannot extract a solution from a ") +
                                    to_string(sol.status) + " LP result");
  const auto& lay = compiled.layout;
  if (sol.primal.size() != compiled.lp.num_variables() || lay.plan.size() != in.links.size())
    fail(ErrorKind::Structural, "LP solution does not match the instance's variable universe");

  auto value = [&](std::size_t j) { return sol.primal.at(j); };
  PlanningSolution out;
  for (std::size_t l = 0; l < in.links.size(); ++l)
    out.planned_interchange[{in.links[l].from, in.links[l].to}] = value(lay.plan[l]);
  for (std::size_t k = 0; k < lay.scenarios.size(); ++k) {
    const auto& blk = lay.scenarios[k];
    if (blk.production.size() != in.generators.size() || blk.actual.size() != in.links.size() ||
        blk.shortage.size() != in.regions.size())
      fail(ErrorKind::Structural, "LP scenario block does not match the instance");
    if (blk.scenario >= in.scenarios.size())
      fail(ErrorKind::Structural, "LP scenario block does not match the instance");
    const std::string& sid = in.scenarios[blk.scenario].id;
    for (std::size_t g = 0; g < in.generators.size(); ++g)
      out.production[{in.generators[g].region, in.generators[g].fuel, sid}] = value(blk.production[g]);
    for (std::size_t l = 0; l < in.links.size(); ++l) {
      out.actual_interchange[{in.links[l].from, in.links[l].to, sid}] = value(blk.actual[l]);
      out.deviation[{in.links[l].from, in.links[l].to, sid}] = value(blk.deviation[l]);
    }
    for (std::size_t r = 0; r < in.regions.size(); ++r) {
      out.shortage[{in.regions[r], sid}] = value(blk.shortage[r]);
      out.excess[{in.regions[r], sid}] = value(blk.excess[r]);
    }
  }
  out.objective_value = sol.objective;
  return out;
}

CostBreakdown cost_breakdown(const PlanningInstance& in, const PlanningSolution& sol) {
  CostBreakdown c;
  for (const auto& l : in.links) {
    auto it = sol.planned_interchange.find({l.from, l.to});
    if (it != sol.planned_interchange.end()) c.transfer += l.transfer_cost * it->second;
  }
  for (const auto& sc : in.scenarios) {
    const double p = sc.probability;
    for (const auto& g : in.generators) {
      auto it = sol.production.find({g.region, g.fuel, sc.id});
      if (it != sol.production.end()) c.generation += p * g.production_cost * it->second;
    }
    for (const auto& l : in.links) {
      auto it = sol.deviation.find({l.from, l.to, sc.id});
      if (it != sol.deviation.end()) c.deviation_penalty += p * l.deviation_penalty * it->second;
    }
    for (const auto& r : in.regions) {
      auto it = sol.shortage.find({r, sc.id});
      if (it != sol.shortage.end()) c.shortage += p * in.shortage_cost.at(r) * it->second;
      auto ex = sol.excess.find({r, sc.id});
      if (ex != sol.excess.end()) c.excess += p * in.excess_penalty * ex->second;
    }
  }
  c.total = c.generation + c.transfer + c.shortage + c.deviation_penalty + c.excess;
  return c;
}

double max_balance_residual(const PlanningInstance& in, const PlanningSolution& sol) {
  double worst = 0.0;
  for (const auto& sc : in.scenarios) {
    for (const auto& r : in.regions) {
      double lhs = 0.0;
      for (const auto& g : in.generators)
        if (g.region == r) lhs += sol.production.at({g.region, g.fuel, sc.id});
      for (const auto& l : in.links) {
        const double flow = sol.actual_interchange.at({l.from, l.to, sc.id});
        if (l.from == r) lhs -= flow;
        if (l.to == r) lhs += flow;
      }
      lhs += sol.shortage.at({r, sc.id}) - sol.excess.at({r, sc.id});
      worst = std::max(worst, std::abs(lhs - sc.demand.at(r)));
    }
  }
  return worst;
}

PlanningSolution solve_extensive(const PlanningInstance& instance, const LpOptions& options) {
  const auto compiled = build_extensive_form(instance);
  const auto sol = solve(compiled.lp, options);
  if (sol.status != LpStatus::Optimal)
    fail(ErrorKind::Solver, std::string("extensive form LP ended ") + to_string(sol.status));
  return extract_solution(instance, compiled, sol);
}

PlanningInstance single_scenario(const PlanningInstance& instance, std::size_t s) {
  PlanningInstance out = instance;
  out.scenarios = {instance.scenarios.at(s)};
  out.scenarios[0].probability = 1.0;
  return out;
}

}  // namespace gridplan
