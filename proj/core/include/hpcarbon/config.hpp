#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hpcarbon/edition.hpp"
#include "hpcarbon/ingest.hpp"

namespace hpcarbon::cli {

enum class OutputFormat { csv, json };

OutputFormat output_format_from_string(std::string_view s);

// Everything a pipeline run needs; flags override config-file values which
// override these defaults.
struct RunConfig {
    std::filesystem::path data_dir;
    std::filesystem::path manifest;
    std::filesystem::path mix_file;
    std::filesystem::path out_dir = "out";
    std::filesystem::path alias_file;
    std::filesystem::path region_map_file;
    std::filesystem::path trace_dir;

    std::string preset = "paper-table";
    OutputFormat format = OutputFormat::csv;
    char delimiter = ',';
    bool strict = false; // fail ingest on unparseable rows instead of logging them

    FilterPolicy filter;
    double upgrade_threshold = 0.10;
    double default_intensity = 0.300;
    double low_utilization_threshold = 0.5;
    int moore_anchor_year = 2014;
    int koomey_anchor_year = 2019;
    std::vector<int> rank_groups = {5, 50, 500};

    RegionMap region_map() const; // file when configured, builtin otherwise
    AliasMap aliases() const;
};

// Key-value text, one `key = value` per line, '#' comments.
RunConfig load_config_file(const std::filesystem::path& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

// One edition export plus its declared units.
struct ManifestEntry {
    std::filesystem::path file; // resolved against the manifest's directory
    EditionDate date;
    UnitHints units;
};

// Columns: file,year,month,rmax_unit,rpeak_unit,power_unit.
std::vector<ManifestEntry> parse_manifest(const std::filesystem::path& path);

} // namespace hpcarbon::cli
