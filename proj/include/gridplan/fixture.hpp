// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic grid-monitor year: 13 regions, eight fuels, interchange
// between neighbours and a summer demand peak in July and August.

#pragma once

#include <cstdint>
#include <filesystem>

namespace gridplan {

struct FixtureOptions {
  std::uint64_t seed = 2023;
  int year = 2023;
  std::size_t hours = 8760;
  std::uint64_t scenario_seed = 7;  ///< written into the run config
};

struct FixturePaths {
  std::filesystem::path generation_csv;   ///< demand and net generation
  std::filesystem::path interchange_csv;
  std::filesystem::path schema_config;
  std::filesystem::path cost_config;
  std::filesystem::path run_config;
};

/// Writes the dataset and its configs into `dir`. Byte-identical for equal options.
FixturePaths write_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

}  // namespace gridplan
