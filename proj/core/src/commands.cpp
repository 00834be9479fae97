#include "hpcarbon/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/energy_mix.hpp"
#include "hpcarbon/errors.hpp"
#include "hpcarbon/lca.hpp"
#include "hpcarbon/metrics.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const FileError*>(&e)) return exit_missing_file;
    if (dynamic_cast<const ParseError*>(&e)) return exit_data_error;
    if (dynamic_cast<const SchemaError*>(&e)) return exit_data_error;
    if (dynamic_cast<const NormalizationError*>(&e)) return exit_data_error;
    if (dynamic_cast<const ValidationError*>(&e)) return exit_data_error;
    if (dynamic_cast<const EmptyInputError*>(&e)) return exit_data_error;
    if (dynamic_cast<const ConfigError*>(&e)) return exit_config_error;
    if (dynamic_cast<const InsufficientDataError*>(&e)) return exit_insufficient_data;
    return exit_usage;
}

namespace {

void require_exists(const fs::path& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string(what) + " not configured");
    if (!fs::exists(path)) throw FileError(std::string("missing ") + what, path.string());
}

void write_text_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot write", path.string());
    out << content;
}

ordered_json cell_to_json(const std::string& cell) {
    if (cell.empty()) return nullptr;
    try {
        return csv::parse_double(cell, "cell");
    } catch (const NormalizationError&) {
        return cell;
    }
}

ordered_json table_to_json(const csv::Table& table) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < table.header.size(); ++i)
            obj[table.header[i]] = cell_to_json(row[i]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// --- canonical store ---------------------------------------------------------

std::vector<Edition> load_store(const fs::path& out_dir) {
    fs::path dir = out_dir / "editions";
    if (!fs::is_directory(dir))
        throw FileError("no canonical edition store (run ingest first)", dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (starts_with(name, "edition_") && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw FileError("no canonical editions found (run ingest first)", dir.string());

    std::vector<Edition> editions;
    editions.reserve(files.size());
    for (const auto& file : files)
        editions.push_back(read_canonical_edition_file(
            file.string(), date_from_canonical_filename(file.filename().string())));
    return editions;
}

std::vector<SystemRecord> powered_subset(const Edition& edition) {
    std::vector<SystemRecord> out;
    for (const auto& r : edition.records)
        if (r.power_kw) out.push_back(r);
    return out;
}

EnergyMixTable load_mix_or_default(const RunConfig& cfg, std::ostream& log) {
    if (cfg.mix_file.empty()) return EnergyMixTable(cfg.default_intensity);
    std::vector<std::string> warnings;
    auto table = EnergyMixTable::load_file(cfg.mix_file.string(), cfg.default_intensity,
                                           &warnings);
    for (const auto& w : warnings) log << "warning: " << w << "\n";
    return table;
}

// linear-interpolation quantile over an already sorted sample
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

// --- ingest --------------------------------------------------------------------

namespace {

struct IngestUnit {
    Edition edition;
    std::vector<std::vector<std::string>> rejection_rows;
};

std::string normalization_reason(const NormalizationError& e) {
    if (std::string_view(e.what()).find("missing field") != std::string_view::npos)
        return "missing_" + e.field();
    return "invalid_" + e.field();
}

IngestUnit ingest_one(const ManifestEntry& entry, const RunConfig& cfg,
                      const RegionMap& regions) {
    IngestUnit unit;
    unit.edition.date = entry.date;

    auto raw_field = [](const RawRow& raw, const char* name) {
        auto v = std::string_view(name) == "name" ? find_system_name(raw) : raw.find(name);
        return v ? std::string(trim(*v)) : std::string();
    };

    std::vector<SystemRecord> normalized;
    for (const auto& raw : parse_edition_file(entry.file.string(), entry.date,
                                              cfg.delimiter)) {
        try {
            normalized.push_back(normalize(raw, entry.units, regions));
        } catch (const NormalizationError& e) {
            if (cfg.strict) throw;
            unit.rejection_rows.push_back({entry.date.to_string(), raw_field(raw, "rank"),
                                           raw_field(raw, "name"), raw_field(raw, "site"),
                                           normalization_reason(e)});
        }
    }

    FilterResult filtered = filter_edition(normalized, cfg.filter);
    for (const auto& [rec, reason] : filtered.rejected)
        unit.rejection_rows.push_back({entry.date.to_string(), std::to_string(rec.rank),
                                       rec.name, rec.site, to_string(reason)});
    unit.edition.records = std::move(filtered.kept);
    return unit;
}

} // namespace

int cmd_ingest(const RunConfig& cfg, std::ostream& log) {
    try {
        require_exists(cfg.manifest, "manifest");
        auto entries = parse_manifest(cfg.manifest);
        if (entries.empty()) throw SchemaError("manifest lists no edition files");
        for (const auto& e : entries) require_exists(e.file, "edition export");
        if (!cfg.alias_file.empty()) require_exists(cfg.alias_file, "alias map");
        if (!cfg.region_map_file.empty()) require_exists(cfg.region_map_file, "region map");

        const RegionMap regions = cfg.region_map();

        // editions are independent; parse them concurrently
        std::vector<std::future<IngestUnit>> futures;
        futures.reserve(entries.size());
        for (const auto& entry : entries)
            futures.push_back(std::async(std::launch::async, ingest_one, std::cref(entry),
                                         std::cref(cfg), std::cref(regions)));

        std::vector<IngestUnit> units;
        units.reserve(futures.size());
        for (auto& f : futures) units.push_back(f.get());
        std::sort(units.begin(), units.end(), [](const IngestUnit& a, const IngestUnit& b) {
            return a.edition.date < b.edition.date;
        });

        csv::Table rejections;
        rejections.header = {"edition", "rank", "name", "site", "reason"};
        std::size_t total_kept = 0;
        for (const auto& unit : units) {
            std::ostringstream buf;
            write_canonical_edition(buf, unit.edition);
            write_text_file(cfg.out_dir / "editions" /
                                canonical_edition_filename(unit.edition.date),
                            buf.str());
            for (const auto& row : unit.rejection_rows) rejections.rows.push_back(row);
            total_kept += unit.edition.records.size();
            log << "edition " << unit.edition.date.to_string() << ": kept "
                << unit.edition.records.size() << ", rejected "
                << unit.rejection_rows.size() << "\n";
        }
        write_text_file(cfg.out_dir / "rejections.csv", csv::write_string(rejections));
        log << "ingested " << units.size() << " editions, " << total_kept
            << " records kept, " << rejections.rows.size() << " rejected\n";
        return exit_ok;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// --- figures -----------------------------------------------------------------------

namespace {

csv::Table figure1(const std::vector<Edition>& editions, const RunConfig& cfg) {
    csv::Table t;
    t.header = {"date", "mean_ratio", "max_ratio", "mean_rmax", "moore_curve"};

    std::optional<std::pair<double, double>> anchor; // (decimal year, mean rmax)
    for (const auto& ed : editions) {
        if (ed.records.empty()) continue;
        if (ed.date.decimal_year() >= cfg.moore_anchor_year) {
            double sum = 0;
            for (const auto& r : ed.records) sum += r.rmax_gflops;
            anchor = {ed.date.decimal_year(), sum / static_cast<double>(ed.records.size())};
            break;
        }
    }

    for (const auto& ed : editions) {
        if (ed.records.empty()) continue;
        auto ratio = linpack_ratio(ed.records);
        double sum = 0;
        for (const auto& r : ed.records) sum += r.rmax_gflops;
        double mean_rmax = sum / static_cast<double>(ed.records.size());
        std::string moore;
        if (anchor && ed.date.decimal_year() >= anchor->first)
            moore = csv::format_double(reference_law(anchor->first, anchor->second,
                                                     kMooreDoublingYears)(
                ed.date.decimal_year()));
        t.rows.push_back({ed.date.to_string(), csv::format_double(ratio.mean),
                          csv::format_double(ratio.max), csv::format_double(mean_rmax),
                          moore});
    }
    return t;
}

csv::Table figure2(const std::vector<Edition>& editions, const RunConfig& cfg) {
    auto histories = resolve_identities(editions, cfg.upgrade_threshold, cfg.aliases());
    csv::Table t;
    t.header = {"year", "metric", "group", "value"};
    if (histories.empty()) return t;

    for (const auto& [year, groups] : presence_by_group(histories, cfg.rank_groups))
        for (const auto& [group, stat] : groups)
            t.rows.push_back({std::to_string(year), "mean_presence_years",
                              std::to_string(group),
                              csv::format_double(stat.mean_presence_years)});

    for (const auto& [year, regions] : new_systems_by_region(histories, cfg.region_map()))
        for (const auto& [region, count] : regions)
            t.rows.push_back(
                {std::to_string(year), "new_systems", region, std::to_string(count)});
    return t;
}

csv::Table figure3(const RunConfig& cfg) {
    if (cfg.trace_dir.empty())
        throw ConfigError("fig3 needs trace_dir (utilization trace directory)");
    require_exists(cfg.trace_dir, "trace directory");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.trace_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    csv::Table t;
    t.header = {"system", "mean_utilization", "fraction_below_threshold",
                "longest_low_streak_days", "threshold"};
    for (const auto& file : files) {
        auto trace = load_trace_file(file.string(), file.stem().string());
        auto s = utilization_summary(trace, cfg.low_utilization_threshold);
        t.rows.push_back({trace.system_name, csv::format_double(s.mean_utilization),
                          csv::format_double(s.fraction_below_threshold),
                          csv::format_double(s.longest_low_streak_days),
                          csv::format_double(cfg.low_utilization_threshold)});
    }
    return t;
}

csv::Table figure4(const std::vector<Edition>& editions, const RunConfig& cfg) {
    csv::Table t;
    t.header = {"date", "mean_efficiency", "max_efficiency", "koomey_curve"};

    std::optional<std::pair<double, double>> anchor; // (decimal year, max efficiency)
    for (const auto& ed : editions) {
        auto powered = powered_subset(ed);
        if (powered.empty()) continue;
        if (ed.date.decimal_year() >= cfg.koomey_anchor_year) {
            anchor = {ed.date.decimal_year(), power_efficiency(powered).max};
            break;
        }
    }

    for (const auto& ed : editions) {
        auto powered = powered_subset(ed);
        if (powered.empty()) continue;
        auto eff = power_efficiency(powered);
        std::string koomey;
        if (anchor && ed.date.decimal_year() >= anchor->first)
            koomey = csv::format_double(reference_law(anchor->first, anchor->second,
                                                      kKoomeyDoublingYears)(
                ed.date.decimal_year()));
        t.rows.push_back({ed.date.to_string(), csv::format_double(eff.mean),
                          csv::format_double(eff.max), koomey});
    }
    return t;
}

csv::Table figure5(const std::vector<Edition>& editions) {
    csv::Table t;
    t.header = {"date", "mwh_top25", "mwh_all"};
    for (const auto& ed : editions) {
        auto powered = powered_subset(ed);
        if (powered.empty()) continue;
        int k = std::min<int>(25, static_cast<int>(powered.size()));
        t.rows.push_back({ed.date.to_string(),
                          csv::format_double(annual_energy(powered, k)),
                          csv::format_double(annual_energy(powered))});
    }
    return t;
}

csv::Table figure6(const std::vector<Edition>& editions, const EnergyMixTable& mix) {
    csv::Table t;
    t.header = {"date", "min", "q1", "median", "q3", "max", "mean", "count"};
    for (const auto& ed : editions) {
        std::vector<double> values;
        for (const auto& r : ed.records)
            if (r.power_kw) values.push_back(carbon_efficiency(r, mix));
        if (values.empty()) continue;
        std::sort(values.begin(), values.end());
        double sum = 0;
        for (double v : values) sum += v;
        t.rows.push_back({ed.date.to_string(), csv::format_double(values.front()),
                          csv::format_double(quantile_sorted(values, 0.25)),
                          csv::format_double(quantile_sorted(values, 0.50)),
                          csv::format_double(quantile_sorted(values, 0.75)),
                          csv::format_double(values.back()),
                          csv::format_double(sum / static_cast<double>(values.size())),
                          std::to_string(values.size())});
    }
    return t;
}

void emit_figure(const RunConfig& cfg, const std::string& figure_id, const csv::Table& t,
                 std::ostream& log) {
    fs::path dir = cfg.out_dir / "figures";
    if (cfg.format == OutputFormat::csv) {
        fs::path path = dir / (figure_id + ".csv");
        write_text_file(path, csv::write_string(t));
        log << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
    } else {
        ordered_json doc;
        doc["figure"] = figure_id;
        doc["rows"] = table_to_json(t);
        fs::path path = dir / (figure_id + ".json");
        write_text_file(path, doc.dump(2) + "\n");
        log << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
    }
}

} // namespace

int cmd_figures(const RunConfig& cfg, const std::string& figure_id, std::ostream& log) {
    const std::vector<std::string> known = {"fig1", "fig2", "fig3",
                                            "fig4", "fig5", "fig6"};
    if (std::find(known.begin(), known.end(), figure_id) == known.end()) {
        log << "error: unknown figure id '" << figure_id
            << "' (expected fig1..fig6)\n";
        return exit_unknown_figure;
    }
    try {
        csv::Table table;
        if (figure_id == "fig3") {
            table = figure3(cfg);
        } else {
            auto editions = load_store(cfg.out_dir);
            if (figure_id == "fig1") table = figure1(editions, cfg);
            else if (figure_id == "fig2") table = figure2(editions, cfg);
            else if (figure_id == "fig4") table = figure4(editions, cfg);
            else if (figure_id == "fig5") table = figure5(editions);
            else table = figure6(editions, load_mix_or_default(cfg, log));
        }
        emit_figure(cfg, figure_id, table, log);
        return exit_ok;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// --- lca ---------------------------------------------------------------------------

namespace {

std::string quantity_for_usage(const UsageLine& line) {
    if (!line.energy_mwh) return "-";
    return csv::format_double(*line.energy_mwh) + " MWh @ " +
           csv::format_double(*line.intensity_kg_per_kwh) + " kg/kWh";
}

csv::Table report_to_table(const LcaReport& report) {
    csv::Table t;
    t.header = {"section", "component", "quantity", "emissions_t"};
    for (const auto& phase : report.phases) {
        for (const auto& line : phase.lines)
            t.rows.push_back({phase.name, line.component, line.quantity_desc,
                              csv::format_double(round_to_tenth(line.tonnes))});
        t.rows.push_back({phase.name, "Total", "",
                          csv::format_double(round_to_tenth(phase.subtotal_tonnes))});
    }
    for (const auto& line : report.usage)
        t.rows.push_back({"Usage", line.label, quantity_for_usage(line),
                          csv::format_double(round_to_tenth(line.tonnes))});
    t.rows.push_back({"Total", "", "",
                      csv::format_double(round_to_tenth(report.grand_total_tonnes))});
    return t;
}

ordered_json factors_to_json(const EmissionFactors& f) {
    ordered_json j;
    j["name"] = f.preset_name;
    auto opt = [](const std::optional<double>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    j["per_cpu_kg"] = opt(f.per_cpu_kg);
    j["per_node_cpu_bundle_kg"] = opt(f.per_node_cpu_bundle_kg);
    j["per_gb_ddr4_kg"] = opt(f.per_gb_ddr4_kg);
    j["per_gb_hbm2_kg"] = opt(f.per_gb_hbm2_kg);
    j["per_gpu_kg"] = f.per_gpu_kg;
    j["per_node_interconnect_kg"] = f.per_node_interconnect_kg;
    return j;
}

ordered_json report_to_json(const LcaReport& report, const EmissionFactors& factors) {
    ordered_json doc;
    doc["factors"] = factors_to_json(factors);
    doc["phases"] = ordered_json::array();
    for (const auto& phase : report.phases) {
        ordered_json p;
        p["name"] = phase.name;
        p["lines"] = ordered_json::array();
        for (const auto& line : phase.lines) {
            ordered_json l;
            l["component"] = line.component;
            l["quantity"] = line.quantity_desc;
            l["quantity_value"] = line.quantity;
            l["factor_kg_per_unit"] = line.factor_kg_per_unit;
            l["tonnes"] = line.tonnes;
            p["lines"].push_back(std::move(l));
        }
        p["subtotal_t"] = phase.subtotal_tonnes;
        doc["phases"].push_back(std::move(p));
    }
    doc["usage"] = ordered_json::array();
    for (const auto& line : report.usage) {
        ordered_json u;
        u["label"] = line.label;
        u["energy_mwh"] = line.energy_mwh ? ordered_json(*line.energy_mwh)
                                          : ordered_json(nullptr);
        u["intensity_kg_per_kwh"] = line.intensity_kg_per_kwh
                                        ? ordered_json(*line.intensity_kg_per_kwh)
                                        : ordered_json(nullptr);
        u["tonnes"] = line.tonnes;
        doc["usage"].push_back(std::move(u));
    }
    doc["embodied_total_t"] = report.embodied_total_tonnes;
    doc["usage_total_t"] = report.usage_total_tonnes;
    doc["grand_total_t"] = report.grand_total_tonnes;
    return doc;
}

} // namespace

int cmd_lca(const LcaOptions& opts, std::ostream& out, std::ostream& log) {
    try {
        require_exists(opts.bom_file, "BOM file");
        BomFile bom = parse_bom_file(opts.bom_file);

        EmissionFactors factors;
        if (!opts.factors_file.empty()) {
            require_exists(opts.factors_file, "factors file");
            std::ifstream in(opts.factors_file, std::ios::binary);
            BomFile factors_doc = parse_bom(in);
            if (!factors_doc.inline_factors)
                throw ConfigError("factors file has no [factors] block: " +
                                  opts.factors_file);
            factors = *factors_doc.inline_factors;
        } else if (!opts.preset.empty()) {
            factors = EmissionFactors::preset(opts.preset);
        } else if (bom.inline_factors) {
            factors = *bom.inline_factors;
        } else if (bom.preset) {
            factors = EmissionFactors::preset(*bom.preset);
        } else {
            throw ConfigError("no factor preset given (use --preset or a BOM preset line)");
        }
        factors.validate();

        // usage entries referencing (country, year) resolve through the mix
        if (!bom.mix_refs.empty()) {
            EnergyMixTable mix = opts.mix_file.empty()
                                     ? EnergyMixTable(opts.default_intensity)
                                     : EnergyMixTable::load_file(opts.mix_file,
                                                                 opts.default_intensity);
            for (const auto& ref : bom.mix_refs) {
                auto& entry = bom.usage[ref.usage_index];
                if (!entry.energy_mwh)
                    throw ConfigError("usage '" + entry.label +
                                      "' has country/year but no energy_mwh");
                entry.intensity_kg_per_kwh = mix.intensity(ref.country, ref.year).kg_per_kwh;
            }
        }

        std::vector<std::pair<BillOfMaterials, EmissionFactors>> phases;
        phases.reserve(bom.phases.size());
        for (const auto& phase : bom.phases) phases.emplace_back(phase, factors);
        LcaReport report = lifecycle_report(phases, bom.usage);
        verify_report(report);

        const std::string stem = fs::path(opts.bom_file).stem().string();
        fs::path csv_path = fs::path(opts.out_dir) / (stem + "_lca.csv");
        fs::path json_path = fs::path(opts.out_dir) / (stem + "_lca.json");
        write_text_file(csv_path, csv::write_string(report_to_table(report)));
        write_text_file(json_path, report_to_json(report, factors).dump(2) + "\n");

        for (const auto& phase : report.phases)
            out << phase.name << ": "
                << csv::format_double(round_to_tenth(phase.subtotal_tonnes)) << " tCO2eq\n";
        if (!report.usage.empty())
            out << "Usage: " << csv::format_double(round_to_tenth(report.usage_total_tonnes))
                << " tCO2eq\n";
        out << "Total: " << csv::format_double(round_to_tenth(report.grand_total_tonnes))
            << " tCO2eq\n";
        log << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// --- project / budget / mix-check ------------------------------------------------------

namespace {

TimeSeries metric_series(const std::vector<Edition>& editions, const std::string& metric,
                         const EnergyMixTable& mix) {
    TimeSeries series;
    series.label = metric;
    static const std::map<std::string, std::string> units = {
        {"mean_rmax", "GFLOP/s"},        {"max_rmax", "GFLOP/s"},
        {"mean_ratio", ""},              {"max_ratio", ""},
        {"mean_efficiency", "GFLOPS/W"}, {"max_efficiency", "GFLOPS/W"},
        {"mwh_all", "MWh/year"},         {"mwh_top25", "MWh/year"},
        {"mean_carbon_efficiency", "GFLOP/kgCO2eq"},
        {"max_carbon_efficiency", "GFLOP/kgCO2eq"},
    };
    auto unit = units.find(metric);
    if (unit == units.end()) {
        std::string names;
        for (const auto& [name, u] : units) names += (names.empty() ? "" : ", ") + name;
        throw ArgumentError("unknown metric '" + metric + "' (available: " + names + ")");
    }
    series.unit = unit->second;

    for (const auto& ed : editions) {
        if (ed.records.empty()) continue;
        EditionSummary s = edition_summary(ed.records, mix);
        std::optional<double> v;
        if (metric == "mean_rmax") v = s.mean_rmax_gflops;
        else if (metric == "max_rmax") v = s.max_rmax_gflops;
        else if (metric == "mean_ratio") v = s.mean_linpack_ratio;
        else if (metric == "max_ratio") v = s.max_linpack_ratio;
        else if (metric == "mean_efficiency") v = s.mean_efficiency;
        else if (metric == "max_efficiency") v = s.max_efficiency;
        else if (metric == "mwh_all") v = s.mean_annual_energy_all_mwh;
        else if (metric == "mwh_top25") v = s.mean_annual_energy_topk_mwh;
        else if (metric == "mean_carbon_efficiency") v = s.mean_carbon_efficiency;
        else if (metric == "max_carbon_efficiency") v = s.max_carbon_efficiency;
        if (v && *v > 0) series.points.push_back({ed.date.decimal_year(), *v});
    }
    return series;
}

void emit_document(std::ostream& out, OutputFormat format,
                   const std::vector<std::pair<std::string, std::string>>& fields) {
    if (format == OutputFormat::csv) {
        csv::Table t;
        t.header = {"key", "value"};
        for (const auto& [k, v] : fields) t.rows.push_back({k, v});
        csv::write(out, t);
    } else {
        ordered_json doc;
        for (const auto& [k, v] : fields) doc[k] = cell_to_json(v);
        out << doc.dump(2) << "\n";
    }
}

} // namespace

int cmd_project(const RunConfig& cfg, const ProjectOptions& opts, std::ostream& out,
                std::ostream& log) {
    try {
        TimeSeries series;
        if (!opts.series_file.empty()) {
            require_exists(opts.series_file, "series file");
            series = load_series_file(opts.series_file,
                                      fs::path(opts.series_file).stem().string());
        } else if (!opts.metric.empty()) {
            series = metric_series(load_store(cfg.out_dir), opts.metric,
                                   load_mix_or_default(cfg, log));
        } else {
            throw ArgumentError("project needs either --series or --metric");
        }

        TrendFit fit = fit_exponential(series, opts.window);
        double projection = project(fit, opts.horizon);

        std::vector<std::pair<std::string, std::string>> fields;
        fields.emplace_back("label", series.label);
        fields.emplace_back("unit", series.unit);
        fields.emplace_back("n_points", std::to_string(fit.n_points));
        fields.emplace_back("window_start", csv::format_double(fit.window.start));
        fields.emplace_back("window_end", csv::format_double(fit.window.end));
        fields.emplace_back("growth_rate_log2_per_year",
                            csv::format_double(fit.growth_rate));
        fields.emplace_back("doubling_time_years", csv::format_double(fit.doubling_time()));
        fields.emplace_back("anchor_time", csv::format_double(fit.anchor_time));
        fields.emplace_back("anchor_value", csv::format_double(fit.anchor_value));
        fields.emplace_back("r_squared", csv::format_double(fit.r_squared));
        fields.emplace_back("horizon", csv::format_double(opts.horizon));
        fields.emplace_back("projection", csv::format_double(projection));

        auto add_reference = [&](const char* name, double doubling) {
            auto law = reference_law(fit.anchor_time, fit.anchor_value, doubling);
            double at_horizon = law(opts.horizon);
            fields.emplace_back(std::string(name) + "_value_at_horizon",
                                csv::format_double(at_horizon));
            fields.emplace_back(std::string("projection_vs_") + name,
                                csv::format_double(projection / at_horizon));
        };
        if (opts.compare_moore) add_reference("moore", kMooreDoublingYears);
        if (opts.compare_koomey) add_reference("koomey", kKoomeyDoublingYears);

        emit_document(out, opts.format, fields);
        return exit_ok;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_budget(double efficiency_gain, double reduction_target, std::ostream& out,
               std::ostream& log) {
    try {
        double multiplier = carbon_budget(efficiency_gain, reduction_target);
        out << "efficiency_gain = " << fmt_fixed(efficiency_gain, 4) << "\n";
        out << "reduction_target = " << fmt_fixed(reduction_target, 4) << "\n";
        out << "allowed_compute_multiplier = " << fmt_fixed(multiplier, 4) << "\n";
        out << "allowed_compute_multiplier_2dp = " << fmt_fixed(multiplier, 2) << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_mix_check(const MixCheckOptions& opts, std::ostream& out, std::ostream& log) {
    try {
        require_exists(opts.mix_file, "mix file");
        std::vector<std::string> warnings;
        EnergyMixTable table =
            EnergyMixTable::load_file(opts.mix_file, opts.default_intensity, &warnings);
        for (const auto& w : warnings) log << "warning: " << w << "\n";
        out << "entries = " << table.size() << "\n";
        out << "default_intensity = " << csv::format_double(table.default_intensity())
            << "\n";
        if (opts.country && opts.year) {
            auto res = table.intensity(*opts.country, *opts.year);
            out << "intensity = " << csv::format_double(res.kg_per_kwh) << " ("
                << to_string(res.resolution);
            if (res.resolution != MixResolution::default_value)
                out << ", year " << res.resolved_year;
            out << ")\n";
        }
        return exit_ok;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace hpcarbon::cli
