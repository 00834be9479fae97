#include "hpcarbon/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon {

namespace {

void check_single_edition(const std::vector<SystemRecord>& records, const char* op) {
    for (const auto& r : records)
        if (r.edition_date != records.front().edition_date)
            throw ContractViolation(std::string(op) + ": records span multiple edition dates");
}

double record_efficiency(const SystemRecord& r) {
    return r.rmax_gflops / (*r.power_kw * 1000.0);
}

} // namespace

MeanMax linpack_ratio(const std::vector<SystemRecord>& edition) {
    if (edition.empty()) throw EmptyInputError("linpack_ratio: empty edition");
    double sum = 0, max = 0;
    for (const auto& r : edition) {
        double ratio = r.rmax_gflops / r.rpeak_gflops;
        sum += ratio;
        max = std::max(max, ratio);
    }
    return {sum / static_cast<double>(edition.size()), max};
}

MeanMax power_efficiency(const std::vector<SystemRecord>& edition) {
    if (edition.empty()) throw EmptyInputError("power_efficiency: empty edition");
    double sum = 0, max = 0;
    for (const auto& r : edition) {
        if (!r.power_kw)
            throw ContractViolation("power_efficiency: record '" + r.name +
                                    "' has no power (filter upstream)");
        double eff = record_efficiency(r);
        sum += eff;
        max = std::max(max, eff);
    }
    return {sum / static_cast<double>(edition.size()), max};
}

double annual_energy(const std::vector<SystemRecord>& edition, std::optional<int> top_k) {
    if (edition.empty()) throw EmptyInputError("annual_energy: empty edition");
    if (top_k && *top_k <= 0) throw ArgumentError("annual_energy: top_k must be positive");
    if (top_k && static_cast<std::size_t>(*top_k) > edition.size())
        throw ArgumentError("annual_energy: top_k exceeds edition size");
    for (const auto& r : edition)
        if (!r.power_kw)
            throw ContractViolation("annual_energy: record '" + r.name + "' has no power");

    std::vector<const SystemRecord*> selected;
    selected.reserve(edition.size());
    for (const auto& r : edition) selected.push_back(&r);
    if (top_k) {
        std::stable_sort(selected.begin(), selected.end(),
                         [](const SystemRecord* a, const SystemRecord* b) {
                             return a->rank < b->rank;
                         });
        selected.resize(static_cast<std::size_t>(*top_k));
    }

    double sum = 0;
    for (const SystemRecord* r : selected) sum += *r->power_kw * kHoursPerYear / 1000.0;
    return sum / static_cast<double>(selected.size());
}

double carbon_efficiency_value(double efficiency_gflops_per_w, double intensity_kg_per_kwh) {
    // 1 kWh = 3.6e6 J, so GFLOP/kWh = 3.6e6 * GFLOP/J = 3.6e6 * GFLOPS/W.
    return 3.6e6 * efficiency_gflops_per_w / intensity_kg_per_kwh;
}

double carbon_efficiency(const SystemRecord& record, const EnergyMixTable& mix) {
    if (!record.power_kw || !(*record.power_kw > 0))
        throw ContractViolation("carbon_efficiency: record '" + record.name +
                                "' has no power");
    auto res = mix.intensity(record.country, record.edition_date.year);
    return carbon_efficiency_value(record_efficiency(record), res.kg_per_kwh);
}

EditionSummary edition_summary(const std::vector<SystemRecord>& edition,
                               const EnergyMixTable& mix, int top_k) {
    if (edition.empty()) throw EmptyInputError("edition_summary: empty edition");
    check_single_edition(edition, "edition_summary");

    EditionSummary s;
    s.date = edition.front().edition_date;

    auto ratio = linpack_ratio(edition);
    s.mean_linpack_ratio = ratio.mean;
    s.max_linpack_ratio = ratio.max;
    s.ratio_count = edition.size();

    double rmax_sum = 0, rmax_max = 0;
    for (const auto& r : edition) {
        rmax_sum += r.rmax_gflops;
        rmax_max = std::max(rmax_max, r.rmax_gflops);
    }
    s.mean_rmax_gflops = rmax_sum / static_cast<double>(edition.size());
    s.max_rmax_gflops = rmax_max;

    std::vector<SystemRecord> powered;
    powered.reserve(edition.size());
    for (const auto& r : edition)
        if (r.power_kw) powered.push_back(r);
    s.power_count = powered.size();

    if (!powered.empty()) {
        auto eff = power_efficiency(powered);
        s.mean_efficiency = eff.mean;
        s.max_efficiency = eff.max;
        s.mean_annual_energy_all_mwh = annual_energy(powered);
        int k = std::min<int>(top_k, static_cast<int>(powered.size()));
        s.topk_count = static_cast<std::size_t>(k);
        s.mean_annual_energy_topk_mwh = annual_energy(powered, k);

        double csum = 0, cmax = 0;
        for (const auto& r : powered) {
            double c = carbon_efficiency(r, mix);
            csum += c;
            cmax = std::max(cmax, c);
        }
        s.mean_carbon_efficiency = csum / static_cast<double>(powered.size());
        s.max_carbon_efficiency = cmax;
        s.carbon_count = powered.size();
    }
    return s;
}

PresenceTable presence_by_group(const std::vector<SystemHistory>& histories,
                                const std::vector<int>& rank_groups) {
    if (histories.empty()) throw EmptyInputError("presence_by_group: no histories");
    struct Acc {
        double sum = 0;
        int count = 0;
    };
    std::map<int, std::map<int, Acc>> acc;
    for (const auto& h : histories) {
        int year = h.first_apparition.year;
        for (int g : rank_groups)
            if (h.best_rank <= g) {
                auto& cell = acc[year][g];
                cell.sum += h.presence_years();
                cell.count += 1;
            }
    }
    PresenceTable out;
    for (const auto& [year, groups] : acc)
        for (const auto& [g, cell] : groups)
            out[year][g] = {cell.sum / cell.count, cell.count};
    return out;
}

double mean_presence_years(const std::vector<SystemHistory>& histories) {
    if (histories.empty()) throw EmptyInputError("mean_presence_years: no histories");
    double sum = 0;
    for (const auto& h : histories) sum += h.presence_years();
    return sum / static_cast<double>(histories.size());
}

std::map<int, std::map<std::string, int>> new_systems_by_region(
    const std::vector<SystemHistory>& histories, const RegionMap& regions) {
    std::map<int, std::map<std::string, int>> out;
    for (const auto& h : histories)
        out[h.first_apparition.year][regions.region_or_other(h.country)] += 1;
    return out;
}

// --- utilization ---------------------------------------------------------------

void UtilizationTrace::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double v = samples[i].second;
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("utilization fraction " + csv::format_double(v) +
                                  " outside [0, 1] in trace '" + system_name + "'");
        if (i > 0 && !(samples[i - 1].first < samples[i].first))
            throw ValidationError("timestamps not strictly increasing in trace '" +
                                  system_name + "'");
    }
}

UtilizationTrace load_trace(std::istream& in, std::string system_name) {
    csv::ReadOptions opts;
    opts.allow_comments = true;
    opts.has_header = false;
    csv::Table rows = csv::read(in, opts);

    UtilizationTrace trace;
    trace.system_name = std::move(system_name);
    std::size_t start = 0;
    if (!rows.rows.empty()) {
        // treat the first row as a header when its second field is not numeric
        const auto& first = rows.rows.front();
        if (first.size() >= 2) {
            try {
                (void)csv::parse_double(first[1], "utilization");
            } catch (const NormalizationError&) {
                start = 1;
            }
        }
    }
    for (std::size_t i = start; i < rows.rows.size(); ++i) {
        const auto& row = rows.rows[i];
        if (row.size() != 2)
            throw ValidationError("trace rows need timestamp,utilization");
        trace.samples.emplace_back(csv::parse_iso8601(row[0]),
                                   csv::parse_double(row[1], "utilization"));
    }
    trace.validate();
    return trace;
}

UtilizationTrace load_trace_file(const std::string& path, std::string system_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open trace file", path);
    return load_trace(in, std::move(system_name));
}

UtilizationSummary utilization_summary(const UtilizationTrace& trace, double low_threshold) {
    if (trace.samples.size() < 2)
        throw InsufficientDataError("utilization_summary: need at least 2 samples");
    trace.validate();

    double total_s = 0, weighted = 0, below_s = 0;
    double streak_s = 0, longest_s = 0;
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
        double dt = std::chrono::duration<double>(trace.samples[i + 1].first -
                                                  trace.samples[i].first)
                        .count();
        double value = trace.samples[i].second;
        total_s += dt;
        weighted += value * dt;
        if (value < low_threshold) {
            below_s += dt;
            streak_s += dt;
            longest_s = std::max(longest_s, streak_s);
        } else {
            streak_s = 0;
        }
    }
    return {weighted / total_s, below_s / total_s, longest_s / 86400.0};
}

} // namespace hpcarbon
