// SPDX-License-Identifier: Apache-2.0
//
// JSON documents for instances, solutions, reports and configuration.
// Readers reject unknown keys.

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "gridplan/analysis.hpp"
#include "gridplan/benders.hpp"
#include "gridplan/ingest.hpp"
#include "gridplan/model.hpp"
#include "gridplan/scenario_gen.hpp"

namespace gridplan {

using Json = nlohmann::json;

Json to_json(const PlanningInstance& instance);
PlanningInstance instance_from_json(const Json& doc);

Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& doc);

Json to_json(const PlanningSolution& solution);
PlanningSolution solution_from_json(const Json& doc);

Json to_json(const CostBreakdown& costs);
CostBreakdown breakdown_from_json(const Json& doc);

Json to_json(const BendersReport& report, const PlanningInstance& instance);
Json to_json(const EvpiReport& report);
Json to_json(const ScenarioSet& set);
ScenarioSet scenario_set_from_json(const Json& doc);

CostConfig cost_config_from_json(const Json& doc);
SchemaConfig schema_config_from_json(const Json& doc);

/// Throws Error(Io) when the file cannot be read or is not JSON.
Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; written to a temp file and renamed.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& doc);

PlanningInstance load_instance(const std::filesystem::path& path);

/// Throws Error(Input) naming the first key of `doc` outside `allowed`.
void require_keys(const Json& doc, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace gridplan
