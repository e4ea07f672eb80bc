// SPDX-License-Identifier: Apache-2.0
#include "gridplan/fixture.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gridplan/ingest.hpp"
#include "gridplan/json_io.hpp"

namespace gridplan {

namespace fs = std::filesystem;

namespace {

struct RegionSpec {
  const char* id;
  double base;  // mean demand, MWh per hour
  int utc_offset;
  // Installed capacity as a share of peak demand.
  double coal, gas, nuclear, oil, hydro, solar, wind, other;
};

// Loosely shaped on the EIA balancing-region aggregates.
constexpr std::array<RegionSpec, 13> kRegions{{
    {"CAL", 30000, -8, 0.00, 0.55, 0.06, 0.01, 0.12, 0.30, 0.08, 0.04},
    {"CAR", 20000, -5, 0.25, 0.40, 0.25, 0.02, 0.05, 0.06, 0.00, 0.02},
    {"CENT", 15000, -6, 0.30, 0.35, 0.05, 0.01, 0.03, 0.04, 0.45, 0.02},
    {"FLA", 25000, -5, 0.10, 0.65, 0.12, 0.03, 0.00, 0.12, 0.00, 0.03},
    {"MIDA", 50000, -5, 0.20, 0.45, 0.25, 0.02, 0.02, 0.03, 0.05, 0.02},
    {"MIDW", 45000, -6, 0.40, 0.25, 0.15, 0.01, 0.02, 0.03, 0.25, 0.02},
    {"NE", 14000, -5, 0.00, 0.50, 0.22, 0.06, 0.08, 0.05, 0.06, 0.05},
    {"NW", 20000, -8, 0.12, 0.25, 0.03, 0.00, 0.60, 0.04, 0.15, 0.02},
    {"NY", 17000, -5, 0.00, 0.55, 0.18, 0.04, 0.15, 0.03, 0.04, 0.02},
    {"SE", 28000, -6, 0.30, 0.45, 0.22, 0.01, 0.05, 0.05, 0.00, 0.03},
    {"SW", 12000, -7, 0.25, 0.40, 0.15, 0.00, 0.05, 0.25, 0.10, 0.01},
    {"TEN", 19000, -6, 0.30, 0.35, 0.25, 0.00, 0.15, 0.02, 0.00, 0.01},
    {"TEX", 45000, -6, 0.15, 0.50, 0.06, 0.00, 0.01, 0.15, 0.35, 0.01},
}};

constexpr std::array<std::pair<const char*, const char*>, 18> kNeighbours{{
    {"CAL", "NW"},   {"CAL", "SW"},   {"NW", "SW"},   {"CENT", "NW"}, {"CENT", "SW"},  {"SW", "TEX"},
    {"CENT", "TEX"}, {"CENT", "MIDW"}, {"MIDA", "MIDW"}, {"MIDW", "TEN"}, {"MIDA", "NY"}, {"CAR", "MIDA"},
    {"NE", "NY"},    {"CAR", "SE"},   {"CAR", "TEN"}, {"FLA", "SE"},  {"SE", "TEN"},   {"SE", "TEX"},
}};

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, std::round(v * 10.0) / 10.0);
  return std::string(buf, res.ptr);
}

double day_of_year(std::int64_t hour) {
  // Fractional days since 1 January of the hour's year.
  using namespace std::chrono;
  const sys_days day{days{hour / 24}};
  const year_month_day ymd{day};
  const sys_days jan1{ymd.year() / January / 1};
  return double((day - jan1).count()) + double(hour % 24) / 24.0;
}

}  // namespace

FixturePaths write_fixture(const fs::path& dir, const FixtureOptions& opt) {
  using namespace std::chrono;
  fs::create_directories(dir);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const std::int64_t start = duration_cast<hours>(sys_days{year{opt.year} / January / 1}.time_since_epoch()).count();
  const std::size_t H = opt.hours;

  // Demand paths first so interchange and dispatch can follow them.
  std::vector<std::vector<double>> demand(kRegions.size(), std::vector<double>(H));
  for (std::size_t r = 0; r < kRegions.size(); ++r) {
    const auto& spec = kRegions[r];
    for (std::size_t h = 0; h < H; ++h) {
      const std::int64_t hour = start + std::int64_t(h);
      const double doy = day_of_year(hour);
      const double local = std::fmod(double(hour % 24 + spec.utc_offset + 24), 24.0);
      const double summer = std::exp(-std::pow((doy - 210.0) / 28.0, 2.0));
      const double winter = std::exp(-std::pow(std::min(doy, 365.0 - doy) / 30.0, 2.0));
      const double daily = std::sin(std::numbers::pi * (local - 7.0) / 14.0);
      const double shape = 1.0 + 0.35 * summer + 0.08 * winter + 0.12 * std::max(daily, -0.5);
      demand[r][h] = spec.base * shape * (1.0 + 0.02 * gauss(rng));
    }
  }

  std::ostringstream gen;
  gen << "period,respondent,type,value\n";
  const char* fuels[] = {"COL", "NG", "NUC", "OIL", "WAT", "SUN", "WND", "OTH"};
  for (std::size_t r = 0; r < kRegions.size(); ++r) {
    const auto& spec = kRegions[r];
    const double peak = *std::max_element(demand[r].begin(), demand[r].end());
    const double shares[] = {spec.coal, spec.gas, spec.nuclear, spec.oil, spec.hydro, spec.solar, spec.wind, spec.other};
    std::array<double, 8> cap{};
    for (int f = 0; f < 8; ++f) cap[f] = shares[f] * peak * (0.9 + 0.2 * unif(rng));
    double wind_state = 0.4;
    for (std::size_t h = 0; h < H; ++h) {
      const std::int64_t hour = start + std::int64_t(h);
      const std::string ts = format_utc_hour(hour);
      const double doy = day_of_year(hour);
      const double local = std::fmod(double(hour % 24 + spec.utc_offset + 24), 24.0);
      const double load = demand[r][h] / peak;
      gen << ts << ',' << spec.id << ",demand," << num(demand[r][h]) << '\n';
      wind_state = std::clamp(0.9 * wind_state + 0.1 * 0.4 + 0.08 * gauss(rng), 0.0, 1.0);
      for (int f = 0; f < 8; ++f) {
        if (cap[f] <= 0.0) continue;
        double out = 0.0;
        switch (f) {
          case 2:  // nuclear runs flat
            out = cap[f] * std::clamp(0.93 + 0.03 * gauss(rng), 0.0, 1.0);
            break;
          case 4:  // hydro follows the spring melt
            out = cap[f] * std::clamp(0.5 + 0.3 * std::exp(-std::pow((doy - 140.0) / 40.0, 2.0)) + 0.08 * gauss(rng), 0.0, 1.0);
            break;
          case 5: {  // solar
            const double sun = std::max(0.0, std::sin(std::numbers::pi * (local - 6.0) / 13.0));
            const double season = 0.75 + 0.25 * std::cos(2.0 * std::numbers::pi * (doy - 172.0) / 365.0);
            out = cap[f] * sun * season * std::clamp(0.75 + 0.25 * gauss(rng), 0.1, 1.0);
            break;
          }
          case 6:  // wind
            out = cap[f] * wind_state;
            break;
          case 7:  // other: small, occasionally a negative station-service reading
            out = cap[f] * (0.6 + 0.3 * gauss(rng));
            break;
          default:  // thermal units follow load
            out = cap[f] * std::clamp(0.2 + 0.85 * load + 0.05 * gauss(rng), 0.0, 1.0);
        }
        gen << ts << ',' << spec.id << ",net_generation:" << fuels[f] << ',' << num(out) << '\n';
      }
    }
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < kRegions.size(); ++r) index[kRegions[r].id] = r;
  std::ostringstream ic;
  ic << "period,respondent,type,value\n";
  for (const auto& [a, b] : kNeighbours) {
    const std::size_t ia = index.at(a), ib = index.at(b);
    const double fwd = 0.06 * (kRegions[ia].base + kRegions[ib].base) * (0.7 + 0.6 * unif(rng));
    const double back = 0.06 * (kRegions[ia].base + kRegions[ib].base) * (0.7 + 0.6 * unif(rng));
    for (std::size_t h = 0; h < H; ++h) {
      // Positive values flow a -> b.
      const double tilt = demand[ib][h] / kRegions[ib].base - demand[ia][h] / kRegions[ia].base;
      const double x = std::clamp(0.3 + 1.5 * tilt + 0.35 * gauss(rng), -1.0, 1.0);
      const double v = x >= 0 ? x * fwd : x * back;
      ic << format_utc_hour(start + std::int64_t(h)) << ',' << a << ",interchange:" << b << ',' << num(v) << '\n';
    }
  }

  FixturePaths p;
  p.generation_csv = dir / "generation.csv";
  p.interchange_csv = dir / "interchange.csv";
  p.schema_config = dir / "schema.json";
  p.cost_config = dir / "costs.json";
  p.run_config = dir / "run.json";
  write_text_atomic(p.generation_csv, gen.str());
  write_text_atomic(p.interchange_csv, ic.str());

  write_json_file(p.schema_config,
                  Json{{"column_map", {{"timestamp", "period"}, {"region", "respondent"}, {"series", "type"}, {"value", "value"}}}});
  write_json_file(p.cost_config,
                  Json{{"production_cost",
                        {{"COL", 90}, {"NG", 45}, {"NUC", 30}, {"OIL", 160}, {"WAT", 20}, {"SUN", 35}, {"WND", 30}, {"OTH", 70}}},
                       {"shortage_cost", "woo2021"},
                       {"transmission_cost", {{"default", 6}}},
                       {"kappa_trans", 0.5},
                       {"fuel_categories",
                        {{"COL", "dispatchable"},
                         {"NG", "dispatchable"},
                         {"NUC", "fixed"},
                         {"OIL", "dispatchable"},
                         {"OTH", "dispatchable"},
                         {"WAT", "variable"},
                         {"SUN", "variable"},
                         {"WND", "variable"}}},
                       {"fixed_output", "mean"}});
  write_json_file(p.run_config,
                  Json{{"data", {"generation.csv", "interchange.csv"}},
                       {"schema_config", "schema.json"},
                       {"cost_config", "costs.json"},
                       {"output_dir", "out"},
                       {"scenario", {{"grouping", "month"}, {"k_policy", {{"fixed", 4}}}, {"seed", opt.scenario_seed}}},
                       {"solver", {{"method", "benders"}, {"rel_gap", 1e-6}, {"max_iterations", 500}}},
                       {"analysis", {{"evpi", true}, {"sensitivity_delta", 1000}, {"transmission_relaxation", true}}}});
  return p;
}

}  // namespace gridplan
