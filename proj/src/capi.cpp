// SPDX-License-Identifier: Apache-2.0
#include "gridplan/gridplan.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gridplan/analysis.hpp"
#include "gridplan/error.hpp"
#include "gridplan/fixture.hpp"
#include "gridplan/json_io.hpp"
#include "gridplan/pipeline.hpp"

struct gp_instance {
  gridplan::PlanningInstance value;
};

struct gp_solution {
  gridplan::PlanningInstance instance;
  gridplan::PlanningSolution value;
};

struct gp_benders_report {
  gridplan::PlanningInstance instance;
  gridplan::BendersReport value;
};

namespace {

thread_local std::string last_error;

gp_status status_of(gridplan::ErrorKind kind) {
  switch (kind) {
    case gridplan::ErrorKind::Io: return GP_ERR_IO;
    case gridplan::ErrorKind::Validation: return GP_ERR_VALIDATION;
    case gridplan::ErrorKind::Solver: return GP_ERR_SOLVER;
    case gridplan::ErrorKind::Structural: return GP_ERR_STRUCTURAL;
    case gridplan::ErrorKind::Input: return GP_ERR_INPUT;
  }
  return GP_ERR_INTERNAL;
}

template <typename F>
gp_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return GP_OK;
  } catch (const gridplan::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return GP_ERR_INPUT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return GP_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) gridplan::fail(gridplan::ErrorKind::Input, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* gp_version(void) { return "1.0.0"; }

const char* gp_last_error(void) { return last_error.c_str(); }

void gp_string_free(char* s) { std::free(s); }

gp_status gp_instance_load(const char* path, gp_instance** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new gp_instance{gridplan::load_instance(path)};
  });
}

gp_status gp_instance_from_json(const char* json, gp_instance** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new gp_instance{gridplan::instance_from_json(gridplan::Json::parse(json))};
  });
}

gp_status gp_instance_to_json(const gp_instance* instance, char** out) {
  return guarded([&] {
    require(instance, "instance");
    require(out, "out");
    *out = copy_string(gridplan::to_json(instance->value).dump(2));
  });
}

gp_status gp_instance_validate(const gp_instance* instance, char** report) {
  gp_status st = guarded([&] {
    require(instance, "instance");
    const auto rep = gridplan::validate_instance(instance->value);
    if (report) *report = copy_string(rep.to_string());
    if (!rep.ok()) gridplan::fail(gridplan::ErrorKind::Validation, rep.to_string());
  });
  return st;
}

void gp_instance_free(gp_instance* instance) { delete instance; }

gp_status gp_solve_extensive(const gp_instance* instance, gp_solution** out) {
  return guarded([&] {
    require(instance, "instance");
    require(out, "out");
    auto sol = gridplan::solve_extensive(instance->value);
    *out = new gp_solution{instance->value, std::move(sol)};
  });
}

gp_status gp_solve_benders(const gp_instance* instance, const gp_benders_options* options, gp_solution** solution,
                           gp_benders_report** report) {
  return guarded([&] {
    require(instance, "instance");
    require(solution, "solution");
    gridplan::BendersOptions bo;
    if (options) {
      if (options->max_iterations > 0) bo.max_iterations = options->max_iterations;
      if (options->rel_gap > 0) bo.rel_gap = options->rel_gap;
      bo.alpha_down = options->alpha_down;
      bo.parallel = options->parallel != 0;
    }
    auto rep = gridplan::run_benders(instance->value, bo);
    *solution = new gp_solution{instance->value, rep.final_solution};
    const bool converged = rep.converged;
    if (report) *report = new gp_benders_report{instance->value, std::move(rep)};
    if (!converged) gridplan::fail(gridplan::ErrorKind::Solver, "Benders did not converge");
  });
}

double gp_solution_objective(const gp_solution* solution) { return solution ? solution->value.objective_value : 0.0; }

gp_status gp_solution_plan(const gp_solution* solution, const char* from, const char* to, double* value) {
  return guarded([&] {
    require(solution, "solution");
    require(from, "from");
    require(to, "to");
    require(value, "value");
    auto it = solution->value.planned_interchange.find({from, to});
    if (it == solution->value.planned_interchange.end())
      gridplan::fail(gridplan::ErrorKind::Input, std::string("no link ") + from + "->" + to);
    *value = it->second;
  });
}

gp_status gp_solution_costs(const gp_solution* solution, gp_cost_breakdown* out) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    const auto c = gridplan::cost_breakdown(solution->instance, solution->value);
    *out = {c.generation, c.transfer, c.shortage, c.deviation_penalty, c.excess, c.total};
  });
}

gp_status gp_solution_to_json(const gp_solution* solution, char** out) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    *out = copy_string(gridplan::to_json(solution->value).dump(2));
  });
}

void gp_solution_free(gp_solution* solution) { delete solution; }

size_t gp_benders_iterations(const gp_benders_report* report) { return report ? report->value.iterations.size() : 0; }

int gp_benders_converged(const gp_benders_report* report) { return report && report->value.converged ? 1 : 0; }

double gp_benders_gap(const gp_benders_report* report) { return report ? report->value.gap : 0.0; }

gp_status gp_benders_bounds(const gp_benders_report* report, size_t iteration, double* lower, double* upper) {
  return guarded([&] {
    require(report, "report");
    if (iteration >= report->value.iterations.size())
      gridplan::fail(gridplan::ErrorKind::Input, "iteration index out of range");
    const auto& it = report->value.iterations[iteration];
    if (lower) *lower = it.lower_bound;
    if (upper) *upper = it.upper_bound;
  });
}

gp_status gp_benders_to_json(const gp_benders_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = copy_string(gridplan::to_json(report->value, report->instance).dump(2));
  });
}

void gp_benders_report_free(gp_benders_report* report) { delete report; }

gp_status gp_evpi(const gp_instance* instance, gp_method method, gp_evpi_result* out) {
  return guarded([&] {
    require(instance, "instance");
    require(out, "out");
    gridplan::AnalysisOptions opts;
    opts.method = method == GP_METHOD_BENDERS ? gridplan::SolveMethod::Benders : gridplan::SolveMethod::Extensive;
    const auto r = gridplan::evpi(instance->value, opts);
    *out = {r.rp, r.ws, r.ev, r.eev, r.evpi_standard, r.evpi_paper};
  });
}

int gp_run_command(const char* command, const char* config_path, const gp_run_options* options, gp_log_fn log,
                   void* user) {
  if (!command || !config_path) {
    last_error = "command and config path are required";
    return 2;
  }
  gridplan::RunFlags flags;
  if (options) {
    flags.trace = options->trace != 0;
    flags.jobs = options->jobs == 0 ? 1 : options->jobs;
    flags.deterministic_names = options->deterministic_names != 0;
  }
  gridplan::LogSink out, err;
  if (log) {
    out = [log, user](const std::string& line) { log(user, 0, line.c_str()); };
    err = [log, user](const std::string& line) {
      last_error = line;
      log(user, 1, line.c_str());
    };
  } else {
    err = [](const std::string& line) { last_error = line; };
  }
  return gridplan::run_command(command, config_path, flags, out, err);
}

gp_status gp_fixture_write(const char* dir, uint64_t seed, char** run_config_path) {
  return guarded([&] {
    require(dir, "dir");
    gridplan::FixtureOptions opts;
    opts.seed = seed;
    const auto paths = gridplan::write_fixture(dir, opts);
    if (run_config_path) *run_config_path = copy_string(paths.run_config.string());
  });
}

}  // extern "C"
