// SPDX-License-Identifier: Apache-2.0
#include "gridplan/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

#include "gridplan/error.hpp"

namespace gridplan {

std::optional<SeriesId> parse_series(const std::string& text) {
  if (text == "demand") return SeriesId{SeriesKind::Demand, {}};
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon + 1 == text.size()) return std::nullopt;
  const auto head = text.substr(0, colon);
  const auto tail = text.substr(colon + 1);
  if (head == "net_generation") return SeriesId{SeriesKind::NetGeneration, tail};
  if (head == "interchange") return SeriesId{SeriesKind::Interchange, tail};
  return std::nullopt;
}

std::string to_string(const SeriesId& series) {
  switch (series.kind) {
    case SeriesKind::Demand: return "demand";
    case SeriesKind::NetGeneration: return "net_generation:" + series.target;
    case SeriesKind::Interchange: return "interchange:" + series.target;
  }
  return "?";
}

namespace {

bool read_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  out = std::stoi(s.substr(pos, len));
  return true;
}

}  // namespace

std::optional<std::int64_t> parse_utc_hour(const std::string& raw) {
  using namespace std::chrono;
  std::string s = raw;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_int(s, 0, 4, y) || s.size() < 13 || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
      !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') || !read_int(s, 11, 2, h))
    return std::nullopt;
  std::size_t pos = 13;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_int(s, pos + 1, 2, mi)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == ':') {
      if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
      pos += 3;
      // fractional seconds are truncated away with the minutes
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
    }
  }
  int offset_minutes = 0;
  if (pos < s.size() && s[pos] == 'Z' && pos + 1 == s.size()) {
    // UTC
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    int oh = 0, om = 0;
    if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
    std::size_t end = pos + 3;
    if (end < s.size() && s[end] == ':') ++end;
    if (end < s.size()) {
      if (!read_int(s, end, 2, om)) return std::nullopt;
      end += 2;
    }
    if (end != s.size() || oh > 23 || om > 59) return std::nullopt;
    offset_minutes = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
  } else {
    return std::nullopt;  // no offset: ambiguous
  }
  if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const auto minutes_since_epoch = static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * 1440 +
                                   h * 60 + mi - offset_minutes;
  // floor division to the hour
  return minutes_since_epoch >= 0 ? minutes_since_epoch / 60 : -((-minutes_since_epoch + 59) / 60);
}

std::string format_utc_hour(std::int64_t hour) {
  using namespace std::chrono;
  const std::int64_t day_index = hour >= 0 ? hour / 24 : -((-hour + 23) / 24);
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00Z", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hour - day_index * 24));
  return buf;
}

bool Dataset::insert(const HourlyRecord& r) {
  return series_[{r.region, r.series}].emplace(r.hour, r.value).second;
}

const std::map<std::int64_t, double>* Dataset::find(const std::string& region, const SeriesId& id) const {
  auto it = series_.find({region, id});
  return it == series_.end() ? nullptr : &it->second;
}

std::map<Dataset::Key, SeriesCoverage> Dataset::coverage() const {
  std::map<Key, SeriesCoverage> out;
  for (const auto& [key, values] : series_) {
    if (values.empty()) continue;
    SeriesCoverage c;
    c.first = values.begin()->first;
    c.last = values.rbegin()->first;
    c.count = values.size();
    c.gaps = static_cast<std::size_t>(c.last - c.first + 1) - c.count;
    out[key] = c;
  }
  return out;
}

std::optional<std::int64_t> Dataset::last_hour() const {
  std::optional<std::int64_t> last;
  for (const auto& [_, values] : series_)
    if (!values.empty() && (!last || values.rbegin()->first > *last)) last = values.rbegin()->first;
  return last;
}

std::vector<std::string> Dataset::regions() const {
  std::set<std::string> out;
  for (const auto& [key, values] : series_)
    if (key.second.kind == SeriesKind::Demand && !values.empty()) out.insert(key.first);
  return {out.begin(), out.end()};
}

std::size_t Dataset::size() const {
  std::size_t n = 0;
  for (const auto& [_, values] : series_) n += values.size();
  return n;
}

namespace {

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// RFC 4180-style split of one line (no embedded newlines).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') field += '"', ++i;
      else if (c == '"') quoted = false;
      else field += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

ParseResult parse_hourly_csv(std::istream& in, const SchemaConfig& schema) {
  ParseResult out;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, "CSV stream has no header row");
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorKind::Io, "CSV header lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_time = column(schema.timestamp);
  const std::size_t c_region = column(schema.region);
  const std::size_t c_series = column(schema.series);
  const std::size_t c_value = column(schema.value);
  const std::size_t needed = std::max({c_time, c_region, c_series, c_value}) + 1;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < needed) {
      out.rejects.push_back({row, "columns"});
      continue;
    }
    HourlyRecord rec;
    const auto hour = parse_utc_hour(fields[c_time]);
    if (!hour) {
      out.rejects.push_back({row, "timestamp"});
      continue;
    }
    rec.hour = *hour;
    rec.region = fields[c_region];
    if (rec.region.empty()) {
      out.rejects.push_back({row, "region"});
      continue;
    }
    const auto series = parse_series(fields[c_series]);
    if (!series) {
      out.rejects.push_back({row, "series"});
      continue;
    }
    rec.series = *series;
    const auto value = parse_number(fields[c_value]);
    if (!value) {
      out.rejects.push_back({row, "value"});
      continue;
    }
    rec.value = *value;
    if (rec.series.kind == SeriesKind::Demand && rec.value < 0.0) {
      out.rejects.push_back({row, "negative demand"});
      continue;
    }
    if (!out.dataset.insert(rec)) out.rejects.push_back({row, "duplicate"});
  }
  return out;
}

void merge_datasets(Dataset& into, const Dataset& other, std::vector<Reject>& rejects) {
  for (const auto& [key, values] : other.series())
    for (const auto& [hour, v] : values)
      if (!into.insert({hour, key.first, key.second, v})) rejects.push_back({0, "duplicate"});
}

namespace {

template <typename Fn>
void for_window(const std::map<std::int64_t, double>& values, std::int64_t last, const EstimateWindow& w,
                Fn&& fn) {
  for (auto it = values.upper_bound(last - w.hours); it != values.end() && it->first <= last; ++it)
    fn(it->second);
}

}  // namespace

CapacityEstimate estimate_generator_capacity(const Dataset& data, const EstimateWindow& window) {
  CapacityEstimate out;
  const auto last = data.last_hour();
  if (!last) {
    out.warnings.push_back("dataset is empty");
    return out;
  }
  for (const auto& [key, values] : data.series()) {
    if (key.second.kind != SeriesKind::NetGeneration) continue;
    std::optional<double> best;
    for_window(values, *last, window, [&](double v) { best = best ? std::max(*best, v) : v; });
    if (best) out.values[{key.first, key.second.target}] = *best;
    else out.warnings.push_back("no net generation in window for (" + key.first + ", " + key.second.target + ")");
  }
  return out;
}

TransmissionEstimate estimate_transmission_capacity(const Dataset& data, const EstimateWindow& window) {
  TransmissionEstimate out;
  const auto last = data.last_hour();
  if (!last) {
    out.warnings.push_back("dataset is empty");
    return out;
  }
  for (const auto& [key, values] : data.series()) {
    if (key.second.kind != SeriesKind::Interchange) continue;
    const auto& from = key.first;
    const auto& to = key.second.target;
    bool any = false;
    for_window(values, *last, window, [&](double v) {
      any = true;
      if (v > 0.0) {
        auto& cap = out.values[{from, to}];
        cap = std::max(cap, v);
      } else if (v < 0.0) {
        auto& cap = out.values[{to, from}];
        cap = std::max(cap, -v);
      }
    });
    if (!any) out.warnings.push_back("no interchange in window for " + from + "->" + to);
  }
  return out;
}

std::map<GenKey, double> mean_generation(const Dataset& data, const EstimateWindow& window) {
  std::map<GenKey, double> out;
  const auto last = data.last_hour();
  if (!last) return out;
  for (const auto& [key, values] : data.series()) {
    if (key.second.kind != SeriesKind::NetGeneration) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for_window(values, *last, window, [&](double v) {
      sum += std::max(0.0, v);
      ++n;
    });
    if (n) out[{key.first, key.second.target}] = sum / static_cast<double>(n);
  }
  return out;
}

namespace {

FuelCategory category_of(const CostConfig& config, const std::string& fuel) {
  auto it = config.fuel_categories.find(fuel);
  if (it == config.fuel_categories.end())
    fail(ErrorKind::Structural, "fuel '" + fuel + "' has no category in fuel_categories");
  return it->second;
}

}  // namespace

std::vector<GenKey> variable_generation_pairs(const Dataset& data, const CostConfig& config) {
  std::vector<GenKey> out;
  for (const auto& [key, _] : estimate_generator_capacity(data, config.window).values)
    if (category_of(config, key.second) == FuelCategory::Variable) out.push_back(key);
  return out;
}

ObservationMatrix build_observations(const Dataset& data, const CostConfig& config) {
  ObservationMatrix m;
  std::vector<const std::map<std::int64_t, double>*> sources;
  for (const auto& r : data.regions()) {
    m.columns.push_back(demand_column(r));
    sources.push_back(data.find(r, {SeriesKind::Demand, {}}));
  }
  for (const auto& [region, fuel] : variable_generation_pairs(data, config)) {
    m.columns.push_back(availability_column(region, fuel));
    sources.push_back(data.find(region, {SeriesKind::NetGeneration, fuel}));
  }
  if (sources.empty()) return m;

  std::set<std::int64_t> hours;
  for (const auto* s : sources)
    for (const auto& [h, _] : *s) hours.insert(h);
  for (const auto h : hours) {
    std::vector<double> row;
    row.reserve(sources.size());
    bool complete = true;
    for (const auto* s : sources) {
      auto it = s->find(h);
      if (it == s->end()) {
        complete = false;
        break;
      }
      row.push_back(std::max(0.0, it->second));
    }
    if (complete) m.append(h, std::move(row));
    else ++m.dropped_rows;
  }
  return m;
}

PlanningInstance assemble_instance(const Dataset& data, const CostConfig& config,
                                   const std::map<std::string, ScenarioSet>& scenario_sets,
                                   const std::string& slice) {
  auto set = scenario_sets.find(slice);
  if (set == scenario_sets.end() || set->second.scenarios.empty())
    fail(ErrorKind::Structural, "no scenarios for slice '" + slice + "'");

  const auto gen_caps = estimate_generator_capacity(data, config.window);
  const auto link_caps = estimate_transmission_capacity(data, config.window);
  const auto means = mean_generation(data, config.window);

  std::vector<std::string> gaps;
  PlanningInstance inst;
  inst.regions = data.regions();
  const std::set<std::string> region_set(inst.regions.begin(), inst.regions.end());

  std::set<std::string> fuels_seen;
  for (const auto& [key, cap] : gen_caps.values) {
    if (!region_set.count(key.first)) continue;
    fuels_seen.insert(key.second);
  }
  for (const auto& f : fuels_seen) {
    auto cat = config.fuel_categories.find(f);
    if (cat == config.fuel_categories.end()) {
      gaps.push_back("fuel_categories." + f);
      continue;
    }
    if (!config.production_cost.count(f)) gaps.push_back("production_cost." + f);
    inst.fuels.push_back({f, cat->second});
  }

  for (const auto& [key, cap] : gen_caps.values) {
    if (!region_set.count(key.first)) continue;
    const auto cat = config.fuel_categories.find(key.second);
    const auto cost = config.production_cost.find(key.second);
    if (cat == config.fuel_categories.end() || cost == config.production_cost.end()) continue;
    GeneratorSpec g;
    g.region = key.first;
    g.fuel = key.second;
    g.category = cat->second;
    g.rated_power = std::max(0.0, cap);
    g.production_cost = cost->second;
    switch (g.category) {
      case FuelCategory::Fixed: {
        const double level = config.fixed_output == FixedOutputRule::Mean ? means.at(key) : g.rated_power;
        g.available_power = std::min(level, g.rated_power);
        break;
      }
      case FuelCategory::Dispatchable: g.available_power = g.rated_power; break;
      case FuelCategory::Variable: g.available_power = g.rated_power; break;
    }
    inst.generators.push_back(g);
  }

  for (const auto& [key, cap] : link_caps.values) {
    if (!region_set.count(key.first) || !region_set.count(key.second) || cap <= 0.0) continue;
    TransmissionLink link;
    link.from = key.first;
    link.to = key.second;
    link.capacity = cap;
    auto cost = config.transmission_cost.find(key);
    if (cost != config.transmission_cost.end()) link.transfer_cost = cost->second;
    else if (config.transmission_cost_default) link.transfer_cost = *config.transmission_cost_default;
    else gaps.push_back("transmission_cost." + key.first + "->" + key.second);
    inst.links.push_back(link);
  }

  for (const auto& r : inst.regions) {
    auto it = config.shortage_cost_region.find(r);
    if (it != config.shortage_cost_region.end()) inst.shortage_cost[r] = it->second;
    else if (config.shortage_cost_all) inst.shortage_cost[r] = *config.shortage_cost_all;
    else gaps.push_back("shortage_cost." + r);
  }

  if (!gaps.empty()) {
    std::string msg = "cost configuration is missing entries:";
    for (const auto& g : gaps) msg += "\n  " + g;
    fail(ErrorKind::Structural, msg);
  }

  inst.kappa_trans = config.kappa_trans;
  apply_kappa(inst);
  inst.scenarios = set->second.scenarios;

  const auto rep = validate_instance(inst);
  if (!rep.ok()) fail(ErrorKind::Validation, "assembled instance for slice '" + slice + "' is invalid:\n" + rep.to_string());
  return inst;
}

}  // namespace gridplan
