// SPDX-License-Identifier: Apache-2.0
//
// Hourly grid-monitor CSV ingestion, capacity estimation from historical
// maxima, and assembly of planning instances from data plus cost config.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gridplan/model.hpp"
#include "gridplan/scenario_gen.hpp"

namespace gridplan {

enum class SeriesKind { Demand, NetGeneration, Interchange };

/// `demand`, `net_generation:<fuel>` or `interchange:<to_region>`.
struct SeriesId {
  SeriesKind kind = SeriesKind::Demand;
  std::string target;  ///< fuel or counterpart region; empty for demand
  auto operator<=>(const SeriesId&) const = default;
};

std::optional<SeriesId> parse_series(const std::string& text);
std::string to_string(const SeriesId& series);

/// ISO-8601 instant with an explicit UTC offset (`Z` or `+HH:MM`), truncated
/// to the hour. Returns hours since the Unix epoch.
std::optional<std::int64_t> parse_utc_hour(const std::string& text);
std::string format_utc_hour(std::int64_t hour);

struct HourlyRecord {
  std::int64_t hour = 0;
  std::string region;
  SeriesId series;
  double value = 0.0;
};

struct SeriesCoverage {
  std::int64_t first = 0;
  std::int64_t last = 0;
  std::size_t count = 0;
  std::size_t gaps = 0;  ///< missing hours between first and last
};

class Dataset {
 public:
  using Key = std::pair<std::string, SeriesId>;  ///< (region, series)

  /// False when the (region, series, hour) key already exists.
  bool insert(const HourlyRecord& record);

  const std::map<Key, std::map<std::int64_t, double>>& series() const { return series_; }
  const std::map<std::int64_t, double>* find(const std::string& region, const SeriesId& id) const;
  std::map<Key, SeriesCoverage> coverage() const;
  std::optional<std::int64_t> last_hour() const;
  std::vector<std::string> regions() const;  ///< regions carrying demand, sorted
  std::size_t size() const;

 private:
  std::map<Key, std::map<std::int64_t, double>> series_;
};

/// Maps the four semantic fields to CSV column names.
struct SchemaConfig {
  std::string timestamp = "timestamp";
  std::string region = "region";
  std::string series = "series";
  std::string value = "value";
};

struct Reject {
  std::size_t row = 0;  ///< 1-based data row (header excluded)
  std::string reason;
};

struct ParseResult {
  Dataset dataset;
  std::vector<Reject> rejects;
};

/// Streams the CSV; bad rows become rejects, an unusable header throws.
ParseResult parse_hourly_csv(std::istream& in, const SchemaConfig& schema);

/// Adds every record of `other` into `into`; clashes become rejects with reason "duplicate".
void merge_datasets(Dataset& into, const Dataset& other, std::vector<Reject>& rejects);

struct EstimateWindow {
  std::int64_t hours = 8760;  ///< trailing window ending at the last record
};

struct CapacityEstimate {
  std::map<GenKey, double> values;
  std::vector<std::string> warnings;
};

/// Max hourly net generation per (region, fuel) over the window.
CapacityEstimate estimate_generator_capacity(const Dataset& data, const EstimateWindow& window = {});

struct TransmissionEstimate {
  std::map<LinkKey, double> values;
  std::vector<std::string> warnings;
};

/// Directional maxima: positive interchange values of region A towards B
/// count for A->B, negative ones (by magnitude) for B->A.
TransmissionEstimate estimate_transmission_capacity(const Dataset& data, const EstimateWindow& window = {});

/// Mean hourly net generation (negatives clamped) per (region, fuel).
std::map<GenKey, double> mean_generation(const Dataset& data, const EstimateWindow& window = {});

enum class FixedOutputRule { Mean, Max };

struct CostConfig {
  std::map<std::string, double> production_cost;       ///< per fuel, $/MWh
  std::optional<double> shortage_cost_all;             ///< scalar $/MWh
  std::map<std::string, double> shortage_cost_region;  ///< overrides per region
  std::map<LinkKey, double> transmission_cost;         ///< $/MWh
  std::optional<double> transmission_cost_default;
  double kappa_trans = 0.0;
  std::map<std::string, FuelCategory> fuel_categories;
  FixedOutputRule fixed_output = FixedOutputRule::Mean;
  EstimateWindow window;
};

/// Outage cost of $10.37/kWh unserved, in $/MWh.
inline constexpr double kWoo2021ShortageCost = 10370.0;

/// (region, fuel) pairs of Variable fuels with data in the window.
std::vector<GenKey> variable_generation_pairs(const Dataset& data, const CostConfig& config);

/// Joint demand/availability observation matrix over every hour in which all
/// columns are present; negative readings are clamped to zero.
ObservationMatrix build_observations(const Dataset& data, const CostConfig& config);

PlanningInstance assemble_instance(const Dataset& data, const CostConfig& config,
                                   const std::map<std::string, ScenarioSet>& scenario_sets,
                                   const std::string& slice);

}  // namespace gridplan
