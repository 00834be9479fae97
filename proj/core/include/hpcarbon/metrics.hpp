#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpcarbon/edition.hpp"
#include "hpcarbon/energy_mix.hpp"
#include "hpcarbon/ingest.hpp"

namespace hpcarbon {

constexpr double kHoursPerYear = 8760.0;

struct MeanMax {
    double mean = 0;
    double max = 0;
};

// One ratio per record: rmax / rpeak. Unweighted mean.
MeanMax linpack_ratio(const std::vector<SystemRecord>& edition);

// GFLOPS/W per record: rmax / (power * 1000). Every record must carry power.
MeanMax power_efficiency(const std::vector<SystemRecord>& edition);

// Mean annual electricity in MWh over the top_k records by rank
// (nullopt = all). Every record must carry power.
double annual_energy(const std::vector<SystemRecord>& edition,
                     std::optional<int> top_k = std::nullopt);

// GFLOP produced per kgCO2eq emitted: 3.6e6 * (GFLOPS/W) / (kg/kWh).
double carbon_efficiency_value(double efficiency_gflops_per_w, double intensity_kg_per_kwh);
double carbon_efficiency(const SystemRecord& record, const EnergyMixTable& mix);

// Per-edition aggregate. Power-dependent statistics cover only records with
// power; each statistic reports the record count it used.
struct EditionSummary {
    EditionDate date;
    double mean_linpack_ratio = 0;
    double max_linpack_ratio = 0;
    double mean_rmax_gflops = 0;
    double max_rmax_gflops = 0;
    std::size_t ratio_count = 0;

    std::optional<double> mean_efficiency; // GFLOPS/W
    std::optional<double> max_efficiency;
    std::optional<double> mean_annual_energy_all_mwh;
    std::optional<double> mean_annual_energy_topk_mwh;
    std::size_t power_count = 0;
    std::size_t topk_count = 0;

    std::optional<double> mean_carbon_efficiency; // GFLOP/kgCO2eq
    std::optional<double> max_carbon_efficiency;
    std::size_t carbon_count = 0;
};

EditionSummary edition_summary(const std::vector<SystemRecord>& edition,
                               const EnergyMixTable& mix, int top_k = 25);

// --- turnover ----------------------------------------------------------------

struct GroupStat {
    double mean_presence_years = 0;
    int count = 0;
};

// Mean presence per (first-apparition year, rank group). A history belongs
// to group g when its best-ever rank is <= g; groups are nested. Empty
// cells are absent from the map.
using PresenceTable = std::map<int, std::map<int, GroupStat>>;

PresenceTable presence_by_group(const std::vector<SystemHistory>& histories,
                                const std::vector<int>& rank_groups = {5, 50, 500});

double mean_presence_years(const std::vector<SystemHistory>& histories);

// First apparitions per (year, region); each history counted exactly once.
// Countries missing from the map count under "Other".
std::map<int, std::map<std::string, int>> new_systems_by_region(
    const std::vector<SystemHistory>& histories, const RegionMap& regions);

// --- utilization --------------------------------------------------------------

struct UtilizationTrace {
    std::string system_name;
    std::vector<std::pair<std::chrono::sys_seconds, double>> samples;

    void validate() const; // strictly increasing timestamps, fractions in [0,1]
};

// Rows are timestamp_iso8601,utilization_fraction; optional header row.
UtilizationTrace load_trace(std::istream& in, std::string system_name);
UtilizationTrace load_trace_file(const std::string& path, std::string system_name);

struct UtilizationSummary {
    double mean_utilization = 0;         // time-weighted
    double fraction_below_threshold = 0; // of total trace time
    double longest_low_streak_days = 0;
};

// Step-function attribution: each interval takes the left sample's value.
UtilizationSummary utilization_summary(const UtilizationTrace& trace,
                                       double low_threshold = 0.5);

} // namespace hpcarbon
