// SPDX-License-Identifier: Apache-2.0
//
// gridplan validate|scenarios|solve|evpi|sensitivity|report --config <path>

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "gridplan/gridplan.h"

namespace {

void print_line(void*, int is_error, const char* line) {
  std::FILE* f = is_error ? stderr : stdout;
  std::fputs(line, f);
  std::fputc('\n', f);
  std::fflush(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage stochastic planning of interregional grid operations"};
  app.set_version_flag("--version", gp_version());
  app.require_subcommand(1, 1);
  app.footer("Environment:\n  GRIDPLAN_OUTPUT_DIR  overrides the output directory from the config\n\n"
             "Exit codes: 0 ok, 1 I/O, 2 validation or configuration, 3 solver");

  std::string config;
  bool trace = false;
  bool deterministic = false;
  std::size_t jobs = 1;

  const char* commands[][2] = {
      {"validate", "Parse the inputs and validate every slice"},
      {"scenarios", "Cluster historical hours into scenario sets"},
      {"solve", "Solve every slice"},
      {"evpi", "Wait-and-see, mean-value and EVPI figures per slice"},
      {"sensitivity", "Capacity expansion and transmission relaxation experiments"},
      {"report", "Aggregate solve artifacts into summary tables"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Run configuration (JSON)")->required();
    sub->add_flag("--trace", trace, "Print one line per Benders iteration");
    sub->add_option("--jobs", jobs, "Slices solved in parallel")->check(CLI::PositiveNumber);
    sub->add_flag("--deterministic-names", deterministic, "Omit the timestamp from artifact names");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share the configuration exit code.
    return app.exit(e) == 0 ? 0 : 2;
  }

  gp_run_options opts{trace ? 1 : 0, jobs, deterministic ? 1 : 0};
  const std::string command = app.get_subcommands().front()->get_name();
  return gp_run_command(command.c_str(), config.c_str(), &opts, print_line, nullptr);
}
