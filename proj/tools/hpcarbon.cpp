#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hpcarbon/commands.hpp"
#include "hpcarbon/errors.hpp"
#include "hpcarbon/strings.hpp"

namespace {

using hpcarbon::cli::RunConfig;

// flag overrides collected by CLI11; applied on top of the config file
struct Overrides {
    std::string config;
    std::string data_dir;
    std::string manifest;
    std::string mix;
    std::string preset;
    std::string out;
    std::string format;
    std::string aliases;
    std::string region_map;
    std::string trace_dir;
    std::optional<double> default_intensity;
};

void add_common_options(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config, "config file (key = value lines)")
        ->envname("HPCARBON_CONFIG");
    cmd->add_option("--data-dir", ov.data_dir, "directory of raw edition exports");
    cmd->add_option("--manifest", ov.manifest,
                    "manifest: file,year,month,rmax_unit,rpeak_unit,power_unit");
    cmd->add_option("--mix", ov.mix, "grid carbon-intensity table (country,year,kg/kWh)");
    cmd->add_option("--preset", ov.preset, "emission-factor preset name");
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_option("--format", ov.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--aliases", ov.aliases, "identity alias map (tab separated)");
    cmd->add_option("--region-map", ov.region_map, "country,region map file");
    cmd->add_option("--trace-dir", ov.trace_dir, "directory of utilization traces");
    cmd->add_option("--default-intensity", ov.default_intensity,
                    "fallback grid intensity in kgCO2eq/kWh");
}

RunConfig build_config(const Overrides& ov) {
    RunConfig cfg;
    if (!ov.config.empty()) cfg = hpcarbon::cli::load_config_file(ov.config);
    if (!ov.data_dir.empty()) cfg.data_dir = ov.data_dir;
    if (!ov.manifest.empty()) cfg.manifest = ov.manifest;
    if (!ov.mix.empty()) cfg.mix_file = ov.mix;
    if (!ov.preset.empty()) cfg.preset = ov.preset;
    if (!ov.out.empty()) cfg.out_dir = ov.out;
    if (!ov.format.empty()) cfg.format = hpcarbon::cli::output_format_from_string(ov.format);
    if (!ov.aliases.empty()) cfg.alias_file = ov.aliases;
    if (!ov.region_map.empty()) cfg.region_map_file = ov.region_map;
    if (!ov.trace_dir.empty()) cfg.trace_dir = ov.trace_dir;
    if (ov.default_intensity) cfg.default_intensity = *ov.default_intensity;
    return cfg;
}

std::optional<hpcarbon::Window> parse_window(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--window", "expected START:END decimal years");
    try {
        hpcarbon::Window w{std::stod(text.substr(0, colon)),
                           std::stod(text.substr(colon + 1))};
        if (!(w.start < w.end))
            throw CLI::ValidationError("--window", "START must precede END");
        return w;
    } catch (const std::invalid_argument&) {
        throw CLI::ValidationError("--window", "expected START:END decimal years");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Top500/Green500 performance, energy, and carbon analytics"};
    app.require_subcommand(1);

    Overrides ov;
    std::string figure_id, window_text, bom_file, factors_file, series_file, metric;
    double horizon = 0, gain = 0, reduction = 0;
    bool moore = false, koomey = false;
    std::string query_country;
    std::optional<int> query_year;

    auto* ingest = app.add_subcommand("ingest", "parse, normalize, and filter editions");
    add_common_options(ingest, ov);

    auto* figures = app.add_subcommand("figures", "export figure data from the store");
    add_common_options(figures, ov);
    figures->add_option("--figure", figure_id, "figure id: fig1..fig6")->required();

    auto* lca = app.add_subcommand("lca", "life-cycle emissions report from a BOM file");
    add_common_options(lca, ov);
    lca->add_option("--bom", bom_file, "bill-of-materials file")->required();
    lca->add_option("--factors", factors_file, "inline factors file ([factors] block)");

    auto* project = app.add_subcommand("project", "fit an exponential trend and project");
    add_common_options(project, ov);
    project->add_option("--series", series_file, "series file (decimal_year,value)");
    project->add_option("--metric", metric, "metric name computed from the store");
    project->add_option("--window", window_text, "fit window START:END (decimal years)");
    project->add_option("--horizon", horizon, "projection horizon (decimal year)")
        ->required();
    project->add_flag("--moore", moore, "compare against a 2-year doubling law");
    project->add_flag("--koomey", koomey, "compare against an 18-month doubling law");

    auto* budget = app.add_subcommand("budget", "allowed compute multiplier under a "
                                                "reduction target");
    budget->add_option("--gain", gain, "efficiency gain multiplier (>= 1)")->required();
    budget->add_option("--reduction", reduction, "emission reduction target in [0,1)")
        ->required();

    auto* mix_check = app.add_subcommand("mix-check", "validate a mix table and "
                                                      "optionally query it");
    add_common_options(mix_check, ov);
    mix_check->add_option("--country", query_country, "ISO country code to query");
    mix_check->add_option("--year", query_year, "year to query");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return hpcarbon::cli::cmd_ingest(build_config(ov), std::cerr);
        if (figures->parsed())
            return hpcarbon::cli::cmd_figures(build_config(ov), figure_id, std::cerr);
        if (lca->parsed()) {
            RunConfig cfg = build_config(ov);
            hpcarbon::cli::LcaOptions opts;
            opts.bom_file = bom_file;
            opts.factors_file = factors_file;
            if (!ov.preset.empty()) opts.preset = ov.preset;
            opts.mix_file = cfg.mix_file.string();
            opts.default_intensity = cfg.default_intensity;
            opts.out_dir = cfg.out_dir.string();
            return hpcarbon::cli::cmd_lca(opts, std::cout, std::cerr);
        }
        if (project->parsed()) {
            RunConfig cfg = build_config(ov);
            hpcarbon::cli::ProjectOptions opts;
            opts.series_file = series_file;
            opts.metric = metric;
            opts.window = parse_window(window_text);
            opts.horizon = horizon;
            opts.compare_moore = moore;
            opts.compare_koomey = koomey;
            opts.format = cfg.format;
            return hpcarbon::cli::cmd_project(cfg, opts, std::cout, std::cerr);
        }
        if (budget->parsed())
            return hpcarbon::cli::cmd_budget(gain, reduction, std::cout, std::cerr);
        if (mix_check->parsed()) {
            RunConfig cfg = build_config(ov);
            hpcarbon::cli::MixCheckOptions opts;
            opts.mix_file = cfg.mix_file.string();
            opts.default_intensity = cfg.default_intensity;
            if (!query_country.empty()) opts.country = query_country;
            opts.year = query_year;
            return hpcarbon::cli::cmd_mix_check(opts, std::cout, std::cerr);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hpcarbon::cli::exit_code_for(e);
    }
    return hpcarbon::cli::exit_usage;
}
