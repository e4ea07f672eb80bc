/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the gridplan library.
 *
 * Handles are opaque and owned by the caller; release each with its
 * gp_*_free function. Strings returned through `char**` are heap-allocated
 * and released with gp_string_free. Every call returns a gp_status; after a
 * failure gp_last_error() describes it (per thread, valid until the next
 * call on the same thread).
 */
#ifndef GRIDPLAN_H
#define GRIDPLAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GP_API __declspec(dllexport)
#else
#define GP_API __attribute__((visibility("default")))
#endif

typedef enum gp_status {
  GP_OK = 0,
  GP_ERR_IO = 1,
  GP_ERR_VALIDATION = 2,
  GP_ERR_SOLVER = 3,
  GP_ERR_STRUCTURAL = 4,
  GP_ERR_INPUT = 5,
  GP_ERR_INTERNAL = 6
} gp_status;

typedef struct gp_instance gp_instance;
typedef struct gp_solution gp_solution;
typedef struct gp_benders_report gp_benders_report;

typedef enum gp_method { GP_METHOD_BENDERS = 0, GP_METHOD_EXTENSIVE = 1 } gp_method;

typedef struct gp_benders_options {
  size_t max_iterations; /* 0 selects the library default */
  double rel_gap;        /* <= 0 selects the library default */
  double alpha_down;
  int parallel;
} gp_benders_options;

typedef struct gp_evpi_result {
  double rp, ws, ev, eev, evpi_standard, evpi_paper;
} gp_evpi_result;

typedef struct gp_cost_breakdown {
  double generation, transfer, shortage, deviation_penalty, excess, total;
} gp_cost_breakdown;

typedef void (*gp_log_fn)(void* user, int is_error, const char* line);

typedef struct gp_run_options {
  int trace;
  size_t jobs; /* 0 or 1: serial */
  int deterministic_names;
} gp_run_options;

GP_API const char* gp_version(void);
GP_API const char* gp_last_error(void);
GP_API void gp_string_free(char* s);

GP_API gp_status gp_instance_load(const char* path, gp_instance** out);
GP_API gp_status gp_instance_from_json(const char* json, gp_instance** out);
GP_API gp_status gp_instance_to_json(const gp_instance* instance, char** out);
/* GP_OK when valid; GP_ERR_VALIDATION with the violation list in *report. */
GP_API gp_status gp_instance_validate(const gp_instance* instance, char** report);
GP_API void gp_instance_free(gp_instance* instance);

GP_API gp_status gp_solve_extensive(const gp_instance* instance, gp_solution** out);
/* On GP_ERR_SOLVER (no convergence within the limit) both handles are still
 * set and must be freed. `report` may be null. */
GP_API gp_status gp_solve_benders(const gp_instance* instance, const gp_benders_options* options,
                                  gp_solution** solution, gp_benders_report** report);
GP_API double gp_solution_objective(const gp_solution* solution);
/* Planned interchange on link (from, to); GP_ERR_INPUT for an unknown link. */
GP_API gp_status gp_solution_plan(const gp_solution* solution, const char* from, const char* to, double* value);
GP_API gp_status gp_solution_costs(const gp_solution* solution, gp_cost_breakdown* out);
GP_API gp_status gp_solution_to_json(const gp_solution* solution, char** out);
GP_API void gp_solution_free(gp_solution* solution);

GP_API size_t gp_benders_iterations(const gp_benders_report* report);
GP_API int gp_benders_converged(const gp_benders_report* report);
GP_API double gp_benders_gap(const gp_benders_report* report);
GP_API gp_status gp_benders_bounds(const gp_benders_report* report, size_t iteration, double* lower, double* upper);
GP_API gp_status gp_benders_to_json(const gp_benders_report* report, char** out);
GP_API void gp_benders_report_free(gp_benders_report* report);

GP_API gp_status gp_evpi(const gp_instance* instance, gp_method method, gp_evpi_result* out);

/* Runs a CLI command (validate, scenarios, solve, evpi, sensitivity, report).
 * Returns the process exit code: 0 ok, 1 I/O, 2 validation, 3 solver. */
GP_API int gp_run_command(const char* command, const char* config_path, const gp_run_options* options,
                          gp_log_fn log, void* user);

/* Writes the synthetic 13-region year and its configs into `dir`. */
GP_API gp_status gp_fixture_write(const char* dir, uint64_t seed, char** run_config_path);

#ifdef __cplusplus
}
#endif

#endif
