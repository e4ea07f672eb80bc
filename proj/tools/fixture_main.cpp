// SPDX-License-Identifier: Apache-2.0
//
// Writes the synthetic 13-region year and its run configuration.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "gridplan/gridplan.h"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic grid-monitor fixture"};
  std::string dir = "fixture";
  std::uint64_t seed = 2023;
  app.add_option("dir", dir, "Output directory");
  app.add_option("--seed", seed, "Random seed for the dataset");
  CLI11_PARSE(app, argc, argv);

  char* run_config = nullptr;
  if (gp_fixture_write(dir.c_str(), seed, &run_config) != GP_OK) {
    std::fprintf(stderr, "error: %s\n", gp_last_error());
    return 1;
  }
  std::printf("%s\n", run_config);
  gp_string_free(run_config);
  return 0;
}
