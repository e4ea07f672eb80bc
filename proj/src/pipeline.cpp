// SPDX-License-Identifier: Apache-2.0
#include "gridplan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "gridplan/error.hpp"

namespace gridplan {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Console summaries: 12 significant digits hide last-bit noise.
std::string brief(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

bool is_count(const Json& v) { return v.is_number_integer() && v.get<std::int64_t>() >= 0; }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

double positive(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (!v.is_number() || !(v.get<double>() > 0.0))
    fail(ErrorKind::Input, where + "." + key + ": expected a positive number");
  return v.get<double>();
}

std::size_t count(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (!is_count(v) || v.get<std::size_t>() == 0)
    fail(ErrorKind::Input, where + "." + key + ": expected a positive integer");
  return v.get<std::size_t>();
}

std::string text(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (!v.is_string()) fail(ErrorKind::Input, where + "." + key + ": expected a string");
  return v.get<std::string>();
}

bool flag(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (!v.is_boolean()) fail(ErrorKind::Input, where + "." + key + ": expected true or false");
  return v.get<bool>();
}

}  // namespace

RunConfig parse_run_config(const Json& doc, const fs::path& base_dir) {
  require_keys(doc, {"description", "data", "schema_config", "cost_config", "instances", "output_dir", "scenario",
                     "solver", "analysis", "slices"},
               "config");
  RunConfig c;
  c.base_dir = base_dir;

  if (doc.contains("data")) {
    const auto& d = doc.at("data");
    if (d.is_string()) {
      c.data.push_back(resolve(base_dir, d.get<std::string>()));
    } else if (d.is_array()) {
      for (const auto& p : d) {
        if (!p.is_string()) fail(ErrorKind::Input, "config.data: expected file paths");
        c.data.push_back(resolve(base_dir, p.get<std::string>()));
      }
    } else {
      fail(ErrorKind::Input, "config.data: expected a path or a list of paths");
    }
  }
  if (doc.contains("schema_config")) c.schema_config = resolve(base_dir, text(doc, "schema_config", "config"));
  if (doc.contains("cost_config")) c.cost_config = resolve(base_dir, text(doc, "cost_config", "config"));
  if (doc.contains("instances")) {
    const auto& m = doc.at("instances");
    if (!m.is_object()) fail(ErrorKind::Input, "config.instances: expected an object of name -> path");
    for (const auto& [name, p] : m.items()) {
      if (!p.is_string()) fail(ErrorKind::Input, "config.instances." + name + ": expected a path");
      c.instances[name] = resolve(base_dir, p.get<std::string>());
    }
  }
  if (c.data.empty() == c.instances.empty())
    fail(ErrorKind::Input, "config: give exactly one of 'data' (hourly CSV files) or 'instances'");
  if (c.data_mode() && !c.cost_config) fail(ErrorKind::Input, "config: 'cost_config' is required with 'data'");
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, text(doc, "output_dir", "config"));
  else c.output_dir = base_dir / "out";

  if (doc.contains("scenario")) {
    const auto& s = doc.at("scenario");
    const std::string w = "config.scenario";
    require_keys(s, {"grouping", "k_policy", "seed", "restarts", "max_iters"}, w);
    if (s.contains("grouping")) {
      const auto g = text(s, "grouping", w);
      if (g == "month") c.grouping = Grouping::Month;
      else if (g == "month_hour") c.grouping = Grouping::MonthHour;
      else fail(ErrorKind::Input, w + ".grouping: expected 'month' or 'month_hour'");
    }
    if (s.contains("k_policy")) {
      const auto& k = s.at("k_policy");
      require_keys(k, {"fixed", "elbow"}, w + ".k_policy");
      if (k.size() != 1) fail(ErrorKind::Input, w + ".k_policy: expected {\"fixed\": k} or {\"elbow\": k_max}");
      if (k.contains("fixed")) c.k_policy = KPolicy::fixed(count(k, "fixed", w + ".k_policy"));
      else c.k_policy = KPolicy::elbow(count(k, "elbow", w + ".k_policy"));
    }
    if (s.contains("seed")) {
      if (!is_count(s.at("seed"))) fail(ErrorKind::Input, w + ".seed: expected a nonnegative integer");
      c.seed = s.at("seed").get<std::uint64_t>();
    }
    if (s.contains("restarts")) c.restarts = count(s, "restarts", w);
    if (s.contains("max_iters")) c.max_iters = count(s, "max_iters", w);
  }
  if (c.data_mode() && !c.seed) fail(ErrorKind::Input, "config.scenario.seed is required when clustering data");

  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    const std::string w = "config.solver";
    require_keys(s, {"method", "rel_gap", "max_iterations", "alpha_down"}, w);
    if (s.contains("method")) {
      const auto m = text(s, "method", w);
      if (m == "benders") c.method = SolveMethod::Benders;
      else if (m == "extensive") c.method = SolveMethod::Extensive;
      else fail(ErrorKind::Input, w + ".method: expected 'benders' or 'extensive'");
    }
    if (s.contains("rel_gap")) c.rel_gap = positive(s, "rel_gap", w);
    if (s.contains("max_iterations")) c.max_iterations = count(s, "max_iterations", w);
    if (s.contains("alpha_down")) {
      if (!s.at("alpha_down").is_number()) fail(ErrorKind::Input, w + ".alpha_down: expected a number");
      c.alpha_down = s.at("alpha_down").get<double>();
    }
  }

  if (doc.contains("analysis")) {
    const auto& a = doc.at("analysis");
    const std::string w = "config.analysis";
    require_keys(a, {"evpi", "sensitivity_delta", "transmission_relaxation", "sensitivity_fuel"}, w);
    if (a.contains("evpi")) c.evpi = flag(a, "evpi", w);
    if (a.contains("sensitivity_delta")) c.sensitivity_delta = positive(a, "sensitivity_delta", w);
    if (a.contains("transmission_relaxation")) c.transmission_relaxation = flag(a, "transmission_relaxation", w);
    if (a.contains("sensitivity_fuel")) c.sensitivity_fuel = text(a, "sensitivity_fuel", w);
  }

  if (doc.contains("slices")) {
    const auto& s = doc.at("slices");
    if (!s.is_array()) fail(ErrorKind::Input, "config.slices: expected a list of slice names");
    for (const auto& v : s) {
      if (!v.is_string()) fail(ErrorKind::Input, "config.slices: expected a list of slice names");
      c.slices.push_back(v.get<std::string>());
    }
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  const auto doc = read_json_file(path);
  return parse_run_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return 1;
    case ErrorKind::Solver: return 3;
    case ErrorKind::Validation:
    case ErrorKind::Structural:
    case ErrorKind::Input: return 2;
  }
  return 3;
}

std::string artifact_name(const std::string& command, const std::string& slice, const std::string& ext,
                          const RunFlags& flags) {
  std::string name = command + "_" + slice;
  if (!flags.deterministic_names) name += "_" + flags.timestamp;
  return name + "." + ext;
}

namespace {

struct Slice {
  std::string name;
  PlanningInstance instance;
  std::optional<int> month;
  std::optional<int> hour_of_day;
  double hours = 1.0;
};

struct SliceSource {
  std::string name;
  std::function<PlanningInstance()> load;
  std::optional<int> month;
  std::optional<int> hour_of_day;
  double hours = 1.0;
};

/// Everything a command needs, assembled lazily per slice.
struct Workspace {
  RunConfig config;
  RunFlags flags;
  fs::path out_dir;
  Dataset data;
  CostConfig costs;
  ScenarioBuild build;
  std::vector<SliceSource> sources;
};

class Runner {
 public:
  Runner(RunFlags flags, LogSink out, LogSink err) : flags_(std::move(flags)), out_(std::move(out)), err_(std::move(err)) {}

  int run(const std::string& command, const fs::path& config_path);

 private:
  void prepare(const fs::path& config_path, bool need_scenarios);
  void load_data();
  void cluster();

  int cmd_validate();
  int cmd_scenarios();
  int cmd_solve();
  int cmd_evpi();
  int cmd_sensitivity();
  int cmd_report();

  AnalysisOptions analysis_options() const;
  /// Writes the CSV and JSON twins; returns both paths.
  std::vector<fs::path> write_pair(const std::string& command, const std::string& slice, const std::string& csv,
                                   const Json& json);
  void emit(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) out_(p.string());
  }
  Json meta(const std::string& command, const Slice& s) const;

  /// Runs `task` for each slice on up to flags.jobs threads. Results come
  /// back in slice order; the first failure (in slice order) is rethrown.
  template <typename R>
  std::vector<R> for_each_slice(const std::function<R(const Slice&)>& task);

  RunFlags flags_;
  LogSink out_, err_;
  Workspace ws_;
};

std::optional<std::pair<int, std::optional<int>>> parse_group(const std::string& key) {
  int month = 0, hour = -1;
  if (std::sscanf(key.c_str(), "m%2dh%2d", &month, &hour) == 2 && key.size() == 6)
    return std::pair<int, std::optional<int>>{month, hour};
  if (std::sscanf(key.c_str(), "m%2d", &month) == 1 && key.size() == 3)
    return std::pair<int, std::optional<int>>{month, std::nullopt};
  return std::nullopt;
}

void Runner::load_data() {
  SchemaConfig schema;
  if (ws_.config.schema_config) schema = schema_config_from_json(read_json_file(*ws_.config.schema_config));
  ws_.costs = cost_config_from_json(read_json_file(*ws_.config.cost_config));
  std::vector<Reject> merge_rejects;
  std::map<std::string, std::size_t> reasons;
  for (const auto& path : ws_.config.data) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read data file " + path.string());
    auto parsed = parse_hourly_csv(in, schema);
    for (const auto& r : parsed.rejects) ++reasons[r.reason];
    merge_datasets(ws_.data, parsed.dataset, merge_rejects);
  }
  for (const auto& r : merge_rejects) ++reasons[r.reason];
  for (const auto& [reason, n] : reasons) err_("warning: " + std::to_string(n) + " rows rejected (" + reason + ")");
  if (ws_.data.size() == 0) fail(ErrorKind::Validation, "data files contain no usable records");
}

void Runner::cluster() {
  const auto obs = build_observations(ws_.data, ws_.costs);
  if (obs.dropped_rows) err_("warning: " + std::to_string(obs.dropped_rows) + " hours dropped for missing values");
  KMeansOptions km;
  km.seed = *ws_.config.seed;
  km.restarts = ws_.config.restarts;
  km.max_iters = ws_.config.max_iters;
  ws_.build = build_scenarios(obs, ws_.config.grouping, ws_.config.k_policy, km);
  for (const auto& s : ws_.build.skipped) err_("warning: group " + s.group + " skipped: " + s.reason);
}

void Runner::prepare(const fs::path& config_path, bool need_scenarios) {
  ws_.config = load_run_config(config_path);
  ws_.flags = flags_;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) ws_.out_dir = env;
  else ws_.out_dir = ws_.config.output_dir;

  if (ws_.config.data_mode()) {
    load_data();
    if (!need_scenarios) return;
    cluster();
    std::vector<std::string> names = ws_.config.slices;
    if (names.empty())
      for (const auto& [k, _] : ws_.build.sets) names.push_back(k);
    for (const auto& name : names) {
      SliceSource src;
      src.name = name;
      if (auto g = parse_group(name)) {
        src.month = g->first;
        src.hour_of_day = g->second;
      }
      if (auto it = ws_.build.sets.find(name); it != ws_.build.sets.end()) src.hours = double(it->second.rows);
      src.load = [this, name] { return assemble_instance(ws_.data, ws_.costs, ws_.build.sets, name); };
      ws_.sources.push_back(std::move(src));
    }
  } else {
    std::vector<std::string> names = ws_.config.slices;
    if (names.empty())
      for (const auto& [k, _] : ws_.config.instances) names.push_back(k);
    for (const auto& name : names) {
      auto it = ws_.config.instances.find(name);
      if (it == ws_.config.instances.end()) fail(ErrorKind::Input, "config.slices: no instance named '" + name + "'");
      SliceSource src;
      src.name = name;
      const auto path = it->second;
      src.load = [path, name] {
        auto inst = load_instance(path);
        apply_kappa(inst);
        const auto rep = validate_instance(inst);
        if (!rep.ok()) fail(ErrorKind::Validation, "slice '" + name + "' is invalid:\n" + rep.to_string());
        return inst;
      };
      ws_.sources.push_back(std::move(src));
    }
  }
}

AnalysisOptions Runner::analysis_options() const {
  AnalysisOptions o;
  o.method = ws_.config.method;
  o.benders.rel_gap = ws_.config.rel_gap;
  o.benders.max_iterations = ws_.config.max_iterations;
  o.benders.alpha_down = ws_.config.alpha_down;
  return o;
}

std::vector<fs::path> Runner::write_pair(const std::string& command, const std::string& slice, const std::string& csv,
                            const Json& json) {
  const auto csv_path = ws_.out_dir / artifact_name(command, slice, "csv", ws_.flags);
  const auto json_path = ws_.out_dir / artifact_name(command, slice, "json", ws_.flags);
  write_text_atomic(csv_path, csv);
  write_json_file(json_path, json);
  return {csv_path, json_path};
}

Json Runner::meta(const std::string& command, const Slice& s) const {
  Json m{{"command", command}, {"slice", s.name}, {"hours", s.hours}};
  m["month"] = s.month ? Json(*s.month) : Json(nullptr);
  m["hour_of_day"] = s.hour_of_day ? Json(*s.hour_of_day) : Json(nullptr);
  if (ws_.config.seed) m["seed"] = *ws_.config.seed;
  return m;
}

template <typename R>
std::vector<R> Runner::for_each_slice(const std::function<R(const Slice&)>& task) {
  const std::size_t n = ws_.sources.size();
  std::vector<std::optional<R>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto& src = ws_.sources[i];
        Slice s{src.name, src.load(), src.month, src.hour_of_day, src.hours};
        results[i].emplace(task(s));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max<std::size_t>(flags_.jobs, 1), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

int Runner::cmd_validate() {
  std::size_t bad = 0;
  for (const auto& src : ws_.sources) {
    try {
      src.load();
      out_("ok " + src.name);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Validation && e.kind() != ErrorKind::Structural) throw;
      ++bad;
      err_(e.what());
    }
  }
  if (bad) {
    err_(std::to_string(bad) + " of " + std::to_string(ws_.sources.size()) + " slices failed validation");
    return 2;
  }
  out_("validated " + std::to_string(ws_.sources.size()) + " slices");
  return 0;
}

int Runner::cmd_scenarios() {
  if (!ws_.config.data_mode()) fail(ErrorKind::Input, "scenarios needs hourly data ('data' in the config)");
  std::vector<std::string> names = ws_.config.slices;
  if (names.empty())
    for (const auto& [k, _] : ws_.build.sets) names.push_back(k);
  std::ostringstream summary;
  summary << "group,rows,k,wcss,scenario,probability\n";
  Json summary_json = Json::array();
  for (const auto& name : names) {
    auto it = ws_.build.sets.find(name);
    if (it == ws_.build.sets.end()) fail(ErrorKind::Structural, "no scenarios for slice '" + name + "'");
    {
      const auto& set = it->second;
      Json probs = Json::object();
      for (const auto& sc : set.scenarios) {
        summary << set.group << ',' << set.rows << ',' << set.k << ',' << fmt(set.wcss) << ',' << sc.id << ','
                << fmt(sc.probability) << '\n';
        probs[sc.id] = sc.probability;
      }
      summary_json.push_back({{"group", set.group}, {"rows", set.rows}, {"k", set.k}, {"wcss", set.wcss}, {"probabilities", probs}});
    }
    const auto& set = it->second;
    std::ostringstream csv;
    csv << "scenario,probability,column,value\n";
    for (const auto& sc : set.scenarios) {
      for (const auto& [r, d] : sc.demand)
        csv << sc.id << ',' << fmt(sc.probability) << ',' << demand_column(r) << ',' << fmt(d) << '\n';
      for (const auto& [k, v] : sc.vrrg_available)
        csv << sc.id << ',' << fmt(sc.probability) << ',' << availability_column(k.first, k.second) << ','
            << fmt(v) << '\n';
    }
    Json doc = to_json(set);
    doc["seed"] = *ws_.config.seed;
    emit(write_pair("scenarios", name, csv.str(), doc));
  }
  Json skipped = Json::array();
  for (const auto& g : ws_.build.skipped) skipped.push_back({{"group", g.group}, {"reason", g.reason}});
  emit(write_pair("scenarios", "summary", summary.str(), Json{{"sets", summary_json}, {"skipped", skipped}}));
  return 0;
}

int Runner::cmd_solve() {
  struct Outcome {
    std::vector<std::string> lines;
    std::vector<fs::path> artifacts;
    bool converged = true;
  };
  const auto opts = analysis_options();
  const bool trace = flags_.trace;
  auto results = for_each_slice<Outcome>([&](const Slice& s) {
    Outcome o;
    PlanningSolution sol;
    double gap = 0.0;
    std::size_t iterations = 1;
    Json m = meta("solve", s);
    if (opts.method == SolveMethod::Benders) {
      auto bo = opts.benders;
      bo.lp = opts.lp;
      const auto report = run_benders(s.instance, bo);
      for (const auto& it : report.iterations)
        if (trace)
          o.lines.push_back("trace " + s.name + " " + std::to_string(it.iteration) + " " + fmt(it.lower_bound) + " " +
                            fmt(it.upper_bound) + " " + fmt(it.gap));
      Json bj = to_json(report, s.instance);
      bj["meta"] = meta("benders", s);
      const auto path = ws_.out_dir / artifact_name("benders", s.name, "json", ws_.flags);
      write_json_file(path, bj);
      o.artifacts.push_back(path);
      sol = report.final_solution;
      gap = report.gap;
      iterations = report.iterations.size();
      o.converged = report.converged;
      m["method"] = "benders";
    } else {
      sol = solve_extensive(s.instance, opts.lp);
      m["method"] = "extensive";
    }
    const auto costs = cost_breakdown(s.instance, sol);
    m["objective"] = sol.objective_value;
    m["gap"] = gap;
    m["iterations"] = iterations;
    m["converged"] = o.converged;

    std::ostringstream csv;
    csv << "section,key,scenario,value\n";
    csv << "cost,generation,," << fmt(costs.generation) << '\n'
        << "cost,transfer,," << fmt(costs.transfer) << '\n'
        << "cost,shortage,," << fmt(costs.shortage) << '\n'
        << "cost,deviation_penalty,," << fmt(costs.deviation_penalty) << '\n'
        << "cost,excess,," << fmt(costs.excess) << '\n'
        << "cost,total,," << fmt(costs.total) << '\n';
    for (const auto& [k, v] : sol.planned_interchange)
      csv << "planned_interchange," << k.first << "->" << k.second << ",," << fmt(v) << '\n';
    for (const auto& [k, v] : sol.actual_interchange)
      csv << "actual_interchange," << std::get<0>(k) << "->" << std::get<1>(k) << ',' << std::get<2>(k) << ','
          << fmt(v) << '\n';
    for (const auto& [k, v] : sol.production)
      csv << "production," << std::get<0>(k) << '/' << std::get<1>(k) << ',' << std::get<2>(k) << ',' << fmt(v) << '\n';
    for (const auto& [k, v] : sol.shortage) csv << "shortage," << k.first << ',' << k.second << ',' << fmt(v) << '\n';

    Json doc{{"meta", m}, {"instance", to_json(s.instance)}, {"solution", to_json(sol)}, {"cost_breakdown", to_json(costs)}};
    for (auto& p : write_pair("solve", s.name, csv.str(), doc)) o.artifacts.push_back(p);
    o.lines.push_back(s.name + " objective=" + brief(sol.objective_value) + " gap=" + brief(gap) +
                      " iterations=" + std::to_string(iterations) + (o.converged ? "" : " NOT CONVERGED"));
    return o;
  });
  bool all = true;
  for (const auto& r : results) {
    for (const auto& l : r.lines) out_(l);
    for (const auto& a : r.artifacts) out_(a.string());
    all = all && r.converged;
  }
  if (!all) {
    err_("Benders did not converge within " + std::to_string(ws_.config.max_iterations) + " iterations");
    return 3;
  }
  return 0;
}

int Runner::cmd_evpi() {
  if (!ws_.config.evpi) {
    out_("evpi disabled by configuration (analysis.evpi = false)");
    return 0;
  }
  const auto opts = analysis_options();
  auto paths = for_each_slice<std::pair<std::string, std::vector<fs::path>>>([&](const Slice& s) {
    const auto rep = evpi(s.instance, opts);
    std::ostringstream csv;
    csv << "metric,value\n"
        << "rp," << fmt(rep.rp) << "\nws," << fmt(rep.ws) << "\nev," << fmt(rep.ev) << "\neev," << fmt(rep.eev)
        << "\nevpi_standard," << fmt(rep.evpi_standard) << "\nevpi_paper," << fmt(rep.evpi_paper) << '\n';
    for (const auto& [id, v] : rep.per_scenario) csv << "ws:" << id << ',' << fmt(v) << '\n';
    Json doc = to_json(rep);
    doc["meta"] = meta("evpi", s);
    const auto line = s.name + " rp=" + brief(rep.rp) + " ws=" + brief(rep.ws) + " ev=" + brief(rep.ev) +
                      " eev=" + brief(rep.eev) + " evpi=" + brief(rep.evpi_standard);
    return std::pair{line, write_pair("evpi", s.name, csv.str(), doc)};
  });
  for (const auto& [line, path] : paths) {
    out_(line);
    emit(path);
  }
  return 0;
}

int Runner::cmd_sensitivity() {
  const auto opts = analysis_options();
  auto paths = for_each_slice<std::pair<std::vector<std::string>, std::vector<fs::path>>>([&](const Slice& s) {
    std::vector<std::string> lines;
    std::ostringstream csv;
    csv << "section,key,baseline,modified,saving\n";
    Json doc{{"meta", meta("sensitivity", s)}, {"delta", ws_.config.sensitivity_delta}};
    Json cap = Json::array();
    for (const auto& e : capacity_sensitivity(s.instance, ws_.config.sensitivity_delta, opts, ws_.config.sensitivity_fuel)) {
      cap.push_back({{"region", e.region},
                     {"applicable", e.applicable},
                     {"fuel", e.fuel},
                     {"baseline_cost", e.baseline_cost},
                     {"expanded_cost", e.expanded_cost},
                     {"saving", e.saving}});
      if (!e.applicable) continue;
      csv << "capacity," << e.region << '/' << e.fuel << ',' << fmt(e.baseline_cost) << ',' << fmt(e.expanded_cost)
          << ',' << fmt(e.saving) << '\n';
      lines.push_back(s.name + " capacity " + e.region + "/" + e.fuel + " saving=" + brief(e.saving));
    }
    doc["capacity"] = cap;
    if (ws_.config.transmission_relaxation) {
      const auto t = transmission_relaxation(s.instance, opts);
      Json links = Json::array();
      for (const auto& d : t.per_link) {
        links.push_back({{"from", d.from}, {"to", d.to}, {"baseline", d.baseline}, {"unlimited", d.unlimited}, {"delta", d.delta}});
        csv << "link," << d.from << "->" << d.to << ',' << fmt(d.baseline) << ',' << fmt(d.unlimited) << ','
            << fmt(d.delta) << '\n';
      }
      csv << "transmission,total," << fmt(t.baseline.total) << ',' << fmt(t.unlimited.total) << ','
          << fmt(t.baseline.total - t.unlimited.total) << '\n';
      csv << "transmission,shortage," << fmt(t.baseline.shortage) << ',' << fmt(t.unlimited.shortage) << ','
          << fmt(t.baseline.shortage - t.unlimited.shortage) << '\n';
      doc["transmission"] = {{"capacity_bound", t.capacity_bound},
                             {"baseline", to_json(t.baseline)},
                             {"unlimited", to_json(t.unlimited)},
                             {"saving", t.baseline.total - t.unlimited.total},
                             {"per_link", links}};
      lines.push_back(s.name + " transmission saving=" + brief(t.baseline.total - t.unlimited.total));
    }
    return std::pair{lines, write_pair("sensitivity", s.name, csv.str(), doc)};
  });
  for (const auto& [lines, path] : paths) {
    for (const auto& l : lines) out_(l);
    emit(path);
  }
  return 0;
}

std::string breakdown_csv_row(const CostBreakdown& c) {
  return fmt(c.generation) + "," + fmt(c.transfer) + "," + fmt(c.shortage) + "," + fmt(c.deviation_penalty) + "," +
         fmt(c.excess) + "," + fmt(c.total);
}

int Runner::cmd_report() {
  // Latest solve artifact per slice; names sort by timestamp within a slice.
  std::map<std::string, std::pair<std::string, fs::path>> latest;
  if (fs::is_directory(ws_.out_dir)) {
    for (const auto& entry : fs::directory_iterator(ws_.out_dir)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("solve_", 0) != 0 || entry.path().extension() != ".json") continue;
      const auto doc = read_json_file(entry.path());
      if (!doc.contains("meta") || !doc["meta"].contains("slice")) continue;
      const auto slice = doc["meta"]["slice"].get<std::string>();
      auto& slot = latest[slice];
      if (slot.first.empty() || name > slot.first) slot = {name, entry.path()};
    }
  }
  if (latest.empty()) fail(ErrorKind::Io, "no solve artifacts in " + ws_.out_dir.string() + "; run solve first");

  std::vector<SliceResult> slices;
  for (const auto& [slice, file] : latest) {
    if (!ws_.config.slices.empty() &&
        std::find(ws_.config.slices.begin(), ws_.config.slices.end(), slice) == ws_.config.slices.end())
      continue;
    const auto doc = read_json_file(file.second);
    SliceResult r;
    r.slice = slice;
    const auto& m = doc.at("meta");
    if (!m.at("month").is_null()) r.month = m.at("month").get<int>();
    if (!m.at("hour_of_day").is_null()) r.hour_of_day = m.at("hour_of_day").get<int>();
    r.hours = m.at("hours").get<double>();
    r.instance = instance_from_json(doc.at("instance"));
    r.solution = solution_from_json(doc.at("solution"));
    r.costs = breakdown_from_json(doc.at("cost_breakdown"));
    slices.push_back(std::move(r));
  }
  if (slices.empty()) fail(ErrorKind::Io, "no solve artifacts match the configured slices");
  const auto rep = aggregate_report(slices);
  const std::string scaling = "totals are per-step slice costs times the historical hours behind each slice";

  {
    std::ostringstream csv;
    csv << "category,min,max,mean,median\n";
    Json j = Json::object();
    for (const auto& [cat, s] : rep.stats) {
      csv << cat << ',' << fmt(s.min) << ',' << fmt(s.max) << ',' << fmt(s.mean) << ',' << fmt(s.median) << '\n';
      j[cat] = {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"median", s.median}};
    }
    Json doc{{"slices", slices.size()}, {"stats", j}, {"annual", to_json(rep.annual)}, {"scaling", scaling}};
    emit(write_pair("report", "stats", csv.str(), doc));
  }
  auto period_table = [&](const std::string& name, const char* key, const std::map<int, CostBreakdown>& rows) {
    std::ostringstream csv;
    csv << "# " << scaling << '\n' << key << ",generation,transfer,shortage,deviation_penalty,excess,total\n";
    Json arr = Json::array();
    for (const auto& [k, c] : rows) {
      csv << k << ',' << breakdown_csv_row(c) << '\n';
      Json row = to_json(c);
      row[key] = k;
      arr.push_back(row);
    }
    emit(write_pair("report", name, csv.str(), Json{{"scaling", scaling}, {"rows", arr}}));
  };
  if (!rep.per_month.empty()) period_table("monthly", "month", rep.per_month);
  if (!rep.per_hour.empty()) period_table("hourly", "hour_of_day", rep.per_hour);
  {
    std::ostringstream csv;
    csv << "# " << scaling << '\n' << "region,generation,transfer,shortage,deviation_penalty,total\n";
    Json arr = Json::array();
    for (const auto& [r, c] : rep.per_region) {
      csv << r << ',' << fmt(c.generation) << ',' << fmt(c.transfer) << ',' << fmt(c.shortage) << ','
          << fmt(c.deviation_penalty) << ',' << fmt(c.total()) << '\n';
      arr.push_back({{"region", r},
                     {"generation", c.generation},
                     {"transfer", c.transfer},
                     {"shortage", c.shortage},
                     {"deviation_penalty", c.deviation_penalty},
                     {"total", c.total()}});
    }
    emit(write_pair("report", "regions", csv.str(), Json{{"scaling", scaling}, {"rows", arr}}));
  }
  return 0;
}

int Runner::run(const std::string& command, const fs::path& config_path) {
  if (command == "validate") {
    prepare(config_path, true);
    return cmd_validate();
  }
  if (command == "scenarios") {
    prepare(config_path, true);
    return cmd_scenarios();
  }
  if (command == "solve") {
    prepare(config_path, true);
    return cmd_solve();
  }
  if (command == "evpi") {
    prepare(config_path, true);
    return cmd_evpi();
  }
  if (command == "sensitivity") {
    prepare(config_path, true);
    return cmd_sensitivity();
  }
  if (command == "report") {
    prepare(config_path, false);
    return cmd_report();
  }
  fail(ErrorKind::Input, "unknown command '" + command + "'");
}

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace

int run_command(const std::string& command, const fs::path& config_path, const RunFlags& flags, const LogSink& out,
                const LogSink& err) {
  RunFlags f = flags;
  if (f.timestamp.empty()) f.timestamp = utc_stamp();
  const LogSink quiet = [](const std::string&) {};
  Runner runner(f, out ? out : quiet, err ? err : quiet);
  try {
    return runner.run(command, config_path);
  } catch (const Error& e) {
    if (err) err(std::string("error: ") + e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    if (err) err(std::string("error: ") + e.what());
    return 1;
  } catch (const std::exception& e) {
    if (err) err(std::string("error: ") + e.what());
    return 3;
  }
}

}  // namespace gridplan
