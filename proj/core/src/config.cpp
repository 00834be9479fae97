#include "hpcarbon/config.hpp"

#include <fstream>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/errors.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon::cli {

OutputFormat output_format_from_string(std::string_view s) {
    std::string v = to_lower(trim(s));
    if (v == "csv") return OutputFormat::csv;
    if (v == "json") return OutputFormat::json;
    throw ArgumentError("output format must be csv or json, got '" + std::string(s) + "'");
}

RegionMap RunConfig::region_map() const {
    if (region_map_file.empty()) return RegionMap::builtin_default();
    return RegionMap::load_file(region_map_file.string());
}

AliasMap RunConfig::aliases() const {
    if (alias_file.empty()) return {};
    return AliasMap::load_file(alias_file.string());
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
    std::string v = to_lower(trim(value));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

} // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "data_dir") cfg.data_dir = value;
    else if (key == "manifest") cfg.manifest = value;
    else if (key == "mix") cfg.mix_file = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "aliases") cfg.alias_file = value;
    else if (key == "region_map") cfg.region_map_file = value;
    else if (key == "trace_dir") cfg.trace_dir = value;
    else if (key == "preset") cfg.preset = value;
    else if (key == "format") cfg.format = output_format_from_string(value);
    else if (key == "delimiter") {
        if (value.size() != 1)
            throw ConfigError("config key 'delimiter' expects a single character");
        cfg.delimiter = value[0];
    } else if (key == "strict") cfg.strict = parse_bool(value, key);
    else if (key == "require_power") cfg.filter.require_power = parse_bool(value, key);
    else if (key == "reject_rmax_over_rpeak")
        cfg.filter.reject_rmax_over_rpeak = parse_bool(value, key);
    else if (key == "max_plausible_efficiency")
        cfg.filter.max_plausible_efficiency = csv::parse_double(value, key);
    else if (key == "upgrade_threshold") cfg.upgrade_threshold = csv::parse_double(value, key);
    else if (key == "default_intensity") cfg.default_intensity = csv::parse_double(value, key);
    else if (key == "low_utilization_threshold")
        cfg.low_utilization_threshold = csv::parse_double(value, key);
    else if (key == "moore_anchor_year")
        cfg.moore_anchor_year = static_cast<int>(csv::parse_int(value, key));
    else if (key == "koomey_anchor_year")
        cfg.koomey_anchor_year = static_cast<int>(csv::parse_int(value, key));
    else if (key == "rank_groups") {
        cfg.rank_groups.clear();
        for (const auto& part : split(value, ','))
            cfg.rank_groups.push_back(static_cast<int>(csv::parse_int(part, key)));
    } else
        throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open config file", path.string());

    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value' in config", lineno);
        apply_config_line(cfg, std::string(trim(t.substr(0, eq))),
                          std::string(trim(t.substr(eq + 1))));
    }
    return cfg;
}

std::vector<ManifestEntry> parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open manifest", path.string());

    csv::ReadOptions opts;
    opts.allow_comments = true;
    csv::Table table = csv::read(in, opts);
    if (table.header.size() < 6)
        throw SchemaError(
            "manifest needs columns file,year,month,rmax_unit,rpeak_unit,power_unit");

    auto month_from = [](const std::string& text) {
        std::string v = to_lower(trim(text));
        if (v == "june" || v == "jun") return 6;
        if (v == "november" || v == "nov") return 11;
        return static_cast<int>(csv::parse_int(text, "month"));
    };

    std::vector<ManifestEntry> entries;
    const auto base = path.parent_path();
    for (const auto& row : table.rows) {
        ManifestEntry e;
        std::filesystem::path file = std::string(trim(row[0]));
        e.file = file.is_absolute() ? file : base / file;
        e.date = EditionDate(static_cast<int>(csv::parse_int(row[1], "year")),
                             month_from(row[2]));
        e.units.rmax_unit = perf_unit_from_string(row[3]);
        e.units.rpeak_unit = perf_unit_from_string(row[4]);
        e.units.power_unit = power_unit_from_string(row[5]);
        for (const auto& other : entries)
            if (other.date == e.date)
                throw ConfigError("manifest lists edition " + e.date.to_string() + " twice");
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace hpcarbon::cli
