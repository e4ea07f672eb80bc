// SPDX-License-Identifier: Apache-2.0
//
// Config-driven runs: the command layer behind the CLI.
//
// A run either assembles slices from hourly data (data mode) or loads ready
// instances from JSON files (instance mode). Every command writes its
// artifacts as a CSV table plus a JSON twin.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/analysis.hpp"
#include "gridplan/error.hpp"
#include "gridplan/ingest.hpp"
#include "gridplan/json_io.hpp"
#include "gridplan/scenario_gen.hpp"

namespace gridplan {

/// Overrides the configured output directory when set.
inline constexpr const char* kOutputDirEnv = "GRIDPLAN_OUTPUT_DIR";

struct RunConfig {
  std::filesystem::path base_dir;  ///< directory of the config file
  std::vector<std::filesystem::path> data;
  std::optional<std::filesystem::path> schema_config;
  std::optional<std::filesystem::path> cost_config;
  std::map<std::string, std::filesystem::path> instances;
  std::filesystem::path output_dir = "out";

  Grouping grouping = Grouping::Month;
  KPolicy k_policy = KPolicy::fixed(4);
  std::optional<std::uint64_t> seed;
  std::size_t restarts = 10;
  std::size_t max_iters = 300;

  SolveMethod method = SolveMethod::Benders;
  double rel_gap = 1e-6;
  std::size_t max_iterations = 200;
  double alpha_down = 0.0;

  bool evpi = true;
  double sensitivity_delta = 1000.0;
  bool transmission_relaxation = true;
  std::optional<std::string> sensitivity_fuel;

  std::vector<std::string> slices;  ///< empty: every available slice

  bool data_mode() const { return !data.empty(); }
};

/// Strict parse; relative paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir);

struct RunFlags {
  bool trace = false;
  std::size_t jobs = 1;
  bool deterministic_names = false;
  /// Fixed artifact timestamp (UTC, e.g. 20260101T000000Z); now when empty.
  std::string timestamp;
};

using LogSink = std::function<void(const std::string& line)>;

/// Runs one command and returns the process exit code: 0 ok, 1 I/O,
/// 2 validation (including bad configuration), 3 solver.
int run_command(const std::string& command, const std::filesystem::path& config_path, const RunFlags& flags,
                const LogSink& out, const LogSink& err);

int exit_code(ErrorKind kind);

/// `<command>_<slice>[_<timestamp>].<ext>`
std::string artifact_name(const std::string& command, const std::string& slice, const std::string& ext,
                          const RunFlags& flags);

}  // namespace gridplan
