// SPDX-License-Identifier: Apache-2.0
#include "gridplan/json_io.hpp"

#include <fstream>
#include <sstream>

#include "gridplan/error.hpp"

namespace gridplan {

void require_keys(const Json& doc, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!doc.is_object()) fail(ErrorKind::Input, where + ": expected an object");
  for (const auto& [key, _] : doc.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorKind::Input, where + ": unknown key '" + key + "'");
  }
}

namespace {

template <typename T>
T get(const Json& doc, const char* key, const std::string& where) {
  if (!doc.contains(key)) fail(ErrorKind::Input, where + ": missing key '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Input, where + "." + key + ": " + e.what());
  }
}

double number(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.contains(key) ? doc.at(key) : Json();
  if (!v.is_number()) fail(ErrorKind::Input, where + "." + key + ": expected a number");
  return v.get<double>();
}

std::map<std::string, double> number_map(const Json& doc, const std::string& where) {
  if (!doc.is_object()) fail(ErrorKind::Input, where + ": expected an object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : doc.items()) {
    if (!v.is_number()) fail(ErrorKind::Input, where + "." + k + ": expected a number");
    out[k] = v.get<double>();
  }
  return out;
}

std::string link_name(const std::string& from, const std::string& to) { return from + "->" + to; }

LinkKey parse_link_name(const std::string& text, const std::string& where) {
  const auto arrow = text.find("->");
  if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= text.size())
    fail(ErrorKind::Input, where + ": link key '" + text + "' is not of the form FROM->TO");
  return {text.substr(0, arrow), text.substr(arrow + 2)};
}

}  // namespace

Json scenario_to_json(const Scenario& sc) {
  Json vrrg = Json::object();
  for (const auto& [key, v] : sc.vrrg_available) vrrg[key.first][key.second] = v;
  Json demand = Json::object();
  for (const auto& [r, v] : sc.demand) demand[r] = v;
  return Json{{"id", sc.id}, {"probability", sc.probability}, {"demand", demand}, {"vrrg_available", vrrg}};
}

Scenario scenario_from_json(const Json& doc) {
  const std::string where = "scenario";
  require_keys(doc, {"id", "probability", "demand", "vrrg_available"}, where);
  Scenario sc;
  sc.id = get<std::string>(doc, "id", where);
  sc.probability = number(doc, "probability", where + "[" + sc.id + "]");
  sc.demand = number_map(get<Json>(doc, "demand", where), where + "[" + sc.id + "].demand");
  if (doc.contains("vrrg_available")) {
    const auto& v = doc.at("vrrg_available");
    if (!v.is_object()) fail(ErrorKind::Input, where + ".vrrg_available: expected an object");
    for (const auto& [region, fuels] : v.items())
      for (const auto& [fuel, value] : number_map(fuels, where + ".vrrg_available." + region))
        sc.vrrg_available[{region, fuel}] = value;
  }
  return sc;
}

Json to_json(const PlanningInstance& in) {
  Json doc;
  doc["regions"] = in.regions;
  doc["fuels"] = Json::array();
  for (const auto& f : in.fuels) doc["fuels"].push_back({{"id", f.id}, {"category", to_string(f.category)}});
  doc["generators"] = Json::array();
  for (const auto& g : in.generators)
    doc["generators"].push_back({{"region", g.region},
                                 {"fuel", g.fuel},
                                 {"category", to_string(g.category)},
                                 {"rated_power", g.rated_power},
                                 {"available_power", g.available_power},
                                 {"production_cost", g.production_cost}});
  doc["links"] = Json::array();
  for (const auto& l : in.links) {
    Json link{{"from", l.from}, {"to", l.to}, {"capacity", l.capacity}, {"transfer_cost", l.transfer_cost}};
    if (!in.kappa_trans) link["deviation_penalty"] = l.deviation_penalty;
    doc["links"].push_back(link);
  }
  doc["scenarios"] = Json::array();
  for (const auto& sc : in.scenarios) doc["scenarios"].push_back(scenario_to_json(sc));
  doc["shortage_cost"] = Json::object();
  for (const auto& [r, v] : in.shortage_cost) doc["shortage_cost"][r] = v;
  if (in.kappa_trans) doc["kappa_trans"] = *in.kappa_trans;
  if (in.excess_penalty != 0.0) doc["excess_penalty"] = in.excess_penalty;
  return doc;
}

PlanningInstance instance_from_json(const Json& doc) {
  const std::string where = "instance";
  require_keys(doc, {"regions", "fuels", "generators", "links", "scenarios", "shortage_cost", "kappa_trans",
                     "excess_penalty"},
               where);
  PlanningInstance in;
  in.regions = get<std::vector<std::string>>(doc, "regions", where);
  for (const auto& f : get<Json>(doc, "fuels", where)) {
    require_keys(f, {"id", "category"}, where + ".fuels");
    in.fuels.push_back({get<std::string>(f, "id", "fuel"), parse_fuel_category(get<std::string>(f, "category", "fuel"))});
  }
  if (doc.contains("kappa_trans")) in.kappa_trans = number(doc, "kappa_trans", where);
  if (doc.contains("excess_penalty")) in.excess_penalty = number(doc, "excess_penalty", where);

  for (const auto& g : doc.value("generators", Json::array())) {
    const std::string w = where + ".generators";
    require_keys(g, {"region", "fuel", "category", "rated_power", "available_power", "production_cost"}, w);
    GeneratorSpec spec;
    spec.region = get<std::string>(g, "region", w);
    spec.fuel = get<std::string>(g, "fuel", w);
    if (g.contains("category")) {
      spec.category = parse_fuel_category(get<std::string>(g, "category", w));
    } else if (const Fuel* fuel = in.find_fuel(spec.fuel)) {
      spec.category = fuel->category;
    } else {
      fail(ErrorKind::Input, w + ": generator references unknown fuel '" + spec.fuel + "'");
    }
    spec.rated_power = number(g, "rated_power", w);
    spec.available_power = g.contains("available_power") ? number(g, "available_power", w)
                                                         : (spec.category == FuelCategory::Variable ? spec.rated_power : 0.0);
    spec.production_cost = number(g, "production_cost", w);
    in.generators.push_back(spec);
  }
  for (const auto& l : doc.value("links", Json::array())) {
    const std::string w = where + ".links";
    require_keys(l, {"from", "to", "capacity", "transfer_cost", "deviation_penalty"}, w);
    TransmissionLink link;
    link.from = get<std::string>(l, "from", w);
    link.to = get<std::string>(l, "to", w);
    link.capacity = number(l, "capacity", w);
    link.transfer_cost = number(l, "transfer_cost", w);
    if (in.kappa_trans) {
      link.deviation_penalty = *in.kappa_trans * link.transfer_cost;
      if (l.contains("deviation_penalty") && number(l, "deviation_penalty", w) != link.deviation_penalty)
        fail(ErrorKind::Input, w + ": deviation_penalty of " + link_name(link.from, link.to) +
                                   " contradicts kappa_trans * transfer_cost");
    } else {
      link.deviation_penalty = number(l, "deviation_penalty", w);
    }
    in.links.push_back(link);
  }
  for (const auto& sc : get<Json>(doc, "scenarios", where)) in.scenarios.push_back(scenario_from_json(sc));
  const auto& shortage = get<Json>(doc, "shortage_cost", where);
  if (shortage.is_number()) {
    for (const auto& r : in.regions) in.shortage_cost[r] = shortage.get<double>();
  } else {
    in.shortage_cost = number_map(shortage, where + ".shortage_cost");
  }
  return in;
}

namespace {

Json value_rows3(const std::map<std::tuple<std::string, std::string, std::string>, double>& m, const char* a,
                 const char* b, const char* c) {
  Json out = Json::array();
  for (const auto& [k, v] : m)
    out.push_back({{a, std::get<0>(k)}, {b, std::get<1>(k)}, {c, std::get<2>(k)}, {"value", v}});
  return out;
}

Json value_rows2(const std::map<std::pair<std::string, std::string>, double>& m, const char* a, const char* b) {
  Json out = Json::array();
  for (const auto& [k, v] : m) out.push_back({{a, k.first}, {b, k.second}, {"value", v}});
  return out;
}

void read_rows3(const Json& rows, const char* a, const char* b, const char* c,
                std::map<std::tuple<std::string, std::string, std::string>, double>& out) {
  for (const auto& r : rows)
    out[{get<std::string>(r, a, "solution"), get<std::string>(r, b, "solution"), get<std::string>(r, c, "solution")}] =
        number(r, "value", "solution");
}

void read_rows2(const Json& rows, const char* a, const char* b,
                std::map<std::pair<std::string, std::string>, double>& out) {
  for (const auto& r : rows)
    out[{get<std::string>(r, a, "solution"), get<std::string>(r, b, "solution")}] = number(r, "value", "solution");
}

}  // namespace

Json to_json(const PlanningSolution& s) {
  Json doc;
  doc["objective_value"] = s.objective_value;
  doc["planned_interchange"] = value_rows2(s.planned_interchange, "from", "to");
  doc["production"] = value_rows3(s.production, "region", "fuel", "scenario");
  doc["actual_interchange"] = value_rows3(s.actual_interchange, "from", "to", "scenario");
  doc["deviation"] = value_rows3(s.deviation, "from", "to", "scenario");
  doc["shortage"] = value_rows2(s.shortage, "region", "scenario");
  doc["excess"] = value_rows2(s.excess, "region", "scenario");
  return doc;
}

PlanningSolution solution_from_json(const Json& doc) {
  require_keys(doc, {"objective_value", "planned_interchange", "production", "actual_interchange", "deviation",
                     "shortage", "excess"},
               "solution");
  PlanningSolution s;
  s.objective_value = number(doc, "objective_value", "solution");
  read_rows2(get<Json>(doc, "planned_interchange", "solution"), "from", "to", s.planned_interchange);
  read_rows3(get<Json>(doc, "production", "solution"), "region", "fuel", "scenario", s.production);
  read_rows3(get<Json>(doc, "actual_interchange", "solution"), "from", "to", "scenario", s.actual_interchange);
  read_rows3(get<Json>(doc, "deviation", "solution"), "from", "to", "scenario", s.deviation);
  read_rows2(get<Json>(doc, "shortage", "solution"), "region", "scenario", s.shortage);
  read_rows2(get<Json>(doc, "excess", "solution"), "region", "scenario", s.excess);
  return s;
}

Json to_json(const CostBreakdown& c) {
  return Json{{"generation", c.generation},
              {"transfer", c.transfer},
              {"shortage", c.shortage},
              {"deviation_penalty", c.deviation_penalty},
              {"excess", c.excess},
              {"total", c.total}};
}

CostBreakdown breakdown_from_json(const Json& doc) {
  require_keys(doc, {"generation", "transfer", "shortage", "deviation_penalty", "excess", "total"}, "cost_breakdown");
  CostBreakdown c;
  c.generation = number(doc, "generation", "cost_breakdown");
  c.transfer = number(doc, "transfer", "cost_breakdown");
  c.shortage = number(doc, "shortage", "cost_breakdown");
  c.deviation_penalty = number(doc, "deviation_penalty", "cost_breakdown");
  c.excess = doc.contains("excess") ? number(doc, "excess", "cost_breakdown") : 0.0;
  c.total = number(doc, "total", "cost_breakdown");
  return c;
}

Json to_json(const BendersReport& rep, const PlanningInstance& in) {
  Json links = Json::array();
  for (const auto& l : in.links) links.push_back(link_name(l.from, l.to));
  Json iterations = Json::array();
  for (const auto& it : rep.iterations) {
    iterations.push_back({{"iteration", it.iteration},
                          {"plan", it.plan},
                          {"master_objective", it.master_objective},
                          {"lower_bound", it.lower_bound},
                          {"iteration_upper", it.iteration_upper},
                          {"upper_bound", it.upper_bound},
                          {"gap", it.gap},
                          {"cut",
                           {{"constant", it.cut.constant},
                            {"gradient", it.cut.gradient},
                            {"source_iteration", it.cut.source_iteration}}}});
  }
  return Json{{"links", links},
              {"converged", rep.converged},
              {"gap", rep.gap},
              {"objective", rep.objective()},
              {"best_plan", rep.best_plan},
              {"iterations", iterations}};
}

Json to_json(const EvpiReport& r) {
  Json per = Json::object();
  for (const auto& [k, v] : r.per_scenario) per[k] = v;
  return Json{{"rp", r.rp},
              {"ws", r.ws},
              {"ev", r.ev},
              {"eev", r.eev},
              {"evpi_standard", r.evpi_standard},
              {"evpi_paper", r.evpi_paper},
              {"wait_and_see_per_scenario", per},
              {"mean_plan", r.mean_plan}};
}

Json to_json(const ScenarioSet& set) {
  Json scenarios = Json::array();
  for (const auto& sc : set.scenarios) scenarios.push_back(scenario_to_json(sc));
  return Json{{"group", set.group}, {"rows", set.rows}, {"k", set.k}, {"wcss", set.wcss}, {"scenarios", scenarios}};
}

ScenarioSet scenario_set_from_json(const Json& doc) {
  require_keys(doc, {"group", "rows", "k", "wcss", "scenarios"}, "scenario_set");
  ScenarioSet set;
  set.group = get<std::string>(doc, "group", "scenario_set");
  set.rows = get<std::size_t>(doc, "rows", "scenario_set");
  set.k = get<std::size_t>(doc, "k", "scenario_set");
  set.wcss = number(doc, "wcss", "scenario_set");
  for (const auto& sc : get<Json>(doc, "scenarios", "scenario_set")) set.scenarios.push_back(scenario_from_json(sc));
  return set;
}

CostConfig cost_config_from_json(const Json& doc) {
  const std::string where = "cost_config";
  require_keys(doc, {"production_cost", "shortage_cost", "transmission_cost", "kappa_trans", "fuel_categories",
                     "fixed_output", "window_hours", "note"},
               where);
  CostConfig c;
  c.production_cost = number_map(get<Json>(doc, "production_cost", where), where + ".production_cost");

  const auto& shortage = get<Json>(doc, "shortage_cost", where);
  if (shortage.is_number()) {
    c.shortage_cost_all = shortage.get<double>();
  } else if (shortage.is_string()) {
    if (shortage.get<std::string>() != "woo2021")
      fail(ErrorKind::Input, where + ".shortage_cost: unknown preset '" + shortage.get<std::string>() + "'");
    c.shortage_cost_all = kWoo2021ShortageCost;
  } else {
    for (const auto& [k, v] : number_map(shortage, where + ".shortage_cost")) {
      if (k == "default") c.shortage_cost_all = v;
      else c.shortage_cost_region[k] = v;
    }
  }

  for (const auto& [k, v] : number_map(get<Json>(doc, "transmission_cost", where), where + ".transmission_cost")) {
    if (k == "default") c.transmission_cost_default = v;
    else c.transmission_cost[parse_link_name(k, where + ".transmission_cost")] = v;
  }
  c.kappa_trans = number(doc, "kappa_trans", where);

  const auto& cats = get<Json>(doc, "fuel_categories", where);
  if (!cats.is_object()) fail(ErrorKind::Input, where + ".fuel_categories: expected an object");
  for (const auto& [fuel, cat] : cats.items()) {
    if (!cat.is_string()) fail(ErrorKind::Input, where + ".fuel_categories." + fuel + ": expected a string");
    c.fuel_categories[fuel] = parse_fuel_category(cat.get<std::string>());
  }
  if (doc.contains("fixed_output")) {
    const auto rule = get<std::string>(doc, "fixed_output", where);
    if (rule == "mean") c.fixed_output = FixedOutputRule::Mean;
    else if (rule == "max") c.fixed_output = FixedOutputRule::Max;
    else fail(ErrorKind::Input, where + ".fixed_output: expected 'mean' or 'max'");
  }
  if (doc.contains("window_hours")) c.window.hours = get<std::int64_t>(doc, "window_hours", where);
  return c;
}

SchemaConfig schema_config_from_json(const Json& doc) {
  require_keys(doc, {"column_map"}, "schema_config");
  const auto& map = get<Json>(doc, "column_map", "schema_config");
  require_keys(map, {"timestamp", "region", "series", "value"}, "schema_config.column_map");
  SchemaConfig s;
  s.timestamp = map.value("timestamp", s.timestamp);
  s.region = map.value("region", s.region);
  s.series = map.value("series", s.series);
  s.value = map.value("value", s.value);
  return s;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Io, path.string() + " is not valid JSON: " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out << text;
    if (!out) fail(ErrorKind::Io, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

PlanningInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

}  // namespace gridplan
