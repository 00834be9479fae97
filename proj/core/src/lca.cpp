#include "hpcarbon/lca.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/errors.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon {

void EmissionFactors::validate() const {
    if (per_cpu_kg.has_value() == per_node_cpu_bundle_kg.has_value())
        throw ConfigError("factors '" + preset_name +
                          "': exactly one of per_cpu_kg / per_node_cpu_bundle_kg "
                          "must be set");
    for (auto v : {per_cpu_kg, per_node_cpu_bundle_kg, per_gb_ddr4_kg, per_gb_hbm2_kg})
        if (v && *v < 0) throw ConfigError("factors '" + preset_name + "': negative factor");
    if (per_gpu_kg < 0 || per_node_interconnect_kg < 0)
        throw ConfigError("factors '" + preset_name + "': negative factor");
}

EmissionFactors EmissionFactors::preset(std::string_view name) {
    std::string n = to_lower(trim(name));
    EmissionFactors f;
    f.preset_name = n;
    if (n == "paper-text") {
        f.per_node_cpu_bundle_kg = 250.0;
        f.per_gb_ddr4_kg = 200.0 / 64.0;
        f.per_gb_hbm2_kg = 5.0;
        f.per_gpu_kg = 250.0;
        f.per_node_interconnect_kg = 50.0;
        return f;
    }
    if (n == "paper-table") {
        f.per_cpu_kg = 13.0;
        f.per_gb_hbm2_kg = 7.0;
        f.per_gpu_kg = 575.0;
        f.per_node_interconnect_kg = 50.0;
        return f;
    }
    throw ConfigError("unknown factor preset '" + std::string(name) +
                      "' (available: paper-text, paper-table)");
}

std::vector<std::string> EmissionFactors::preset_names() {
    return {"paper-text", "paper-table"};
}

std::string to_string(MemoryTech t) {
    switch (t) {
        case MemoryTech::none: return "none";
        case MemoryTech::ddr4: return "DDR4";
        case MemoryTech::hbm2: return "HBM2";
    }
    return "none";
}

MemoryTech memory_tech_from_string(std::string_view s) {
    std::string v = to_lower(trim(s));
    if (v.empty() || v == "none") return MemoryTech::none;
    if (v == "ddr4") return MemoryTech::ddr4;
    if (v == "hbm2") return MemoryTech::hbm2;
    throw ConfigError("unknown memory technology '" + std::string(s) + "'");
}

double round_to_tenth(double tonnes) {
    return std::round(tonnes * 10.0) / 10.0;
}

double embodied_component(double quantity, double factor_kg_per_unit) {
    if (quantity < 0) throw ArgumentError("embodied_component: negative quantity");
    if (factor_kg_per_unit < 0) throw ArgumentError("embodied_component: negative factor");
    return quantity * factor_kg_per_unit / 1000.0;
}

double usage_emissions(double energy_mwh, double intensity_kg_per_kwh) {
    if (energy_mwh < 0) throw ArgumentError("usage_emissions: negative energy");
    if (!(intensity_kg_per_kwh > 0))
        throw ArgumentError("usage_emissions: intensity must be positive");
    // MWh * 1000 kWh/MWh * kg/kWh / 1000 kg/t = MWh * kg/kWh
    return energy_mwh * intensity_kg_per_kwh;
}

PhaseResult embodied_phase(const BillOfMaterials& bom, const EmissionFactors& factors) {
    factors.validate();
    if (bom.nodes < 0 || bom.cpus_per_node < 0 || bom.memory_gb < 0 || bom.gpus < 0 ||
        bom.interconnect_nodes < 0)
        throw ArgumentError("embodied_phase: negative quantity in '" + bom.phase_name + "'");

    PhaseResult out;
    out.name = bom.phase_name;

    auto add_line = [&out](std::string component, std::string quantity_desc,
                           double quantity, double factor) {
        double t = embodied_component(quantity, factor);
        out.lines.push_back({std::move(component), std::move(quantity_desc), quantity,
                             factor, t});
        out.subtotal_tonnes += t;
    };

    if (factors.per_cpu_kg) {
        double cpus = static_cast<double>(bom.nodes) * bom.cpus_per_node;
        if (cpus > 0)
            add_line("CPUs",
                     std::to_string(bom.nodes) + " nodes (" +
                         std::to_string(bom.cpus_per_node) + " CPUs/node)",
                     cpus, *factors.per_cpu_kg);
    } else if (bom.nodes > 0) {
        add_line("CPUs", std::to_string(bom.nodes) + " nodes",
                 static_cast<double>(bom.nodes), *factors.per_node_cpu_bundle_kg);
    }

    if (bom.memory_tech != MemoryTech::none && bom.memory_gb > 0) {
        std::optional<double> factor = bom.memory_tech == MemoryTech::ddr4
                                           ? factors.per_gb_ddr4_kg
                                           : factors.per_gb_hbm2_kg;
        if (!factor)
            throw ConfigError("factors '" + factors.preset_name + "' provide no " +
                              to_string(bom.memory_tech) + " factor needed by phase '" +
                              bom.phase_name + "'");
        add_line("Memory (" + to_string(bom.memory_tech) + ")",
                 csv::format_double(bom.memory_gb) + " GB",
                 bom.memory_gb, *factor);
    }

    if (bom.gpus > 0)
        add_line("GPUs", std::to_string(bom.gpus) + " GPUs",
                 static_cast<double>(bom.gpus), factors.per_gpu_kg);

    if (bom.interconnect_nodes > 0)
        add_line("Interconnect + Other", std::to_string(bom.interconnect_nodes) + " nodes",
                 static_cast<double>(bom.interconnect_nodes),
                 factors.per_node_interconnect_kg);

    for (const auto& [label, kg] : bom.lump_sums_kg) {
        if (kg < 0)
            throw ArgumentError("embodied_phase: negative lump sum '" + label + "'");
        add_line(label, "-", 1.0, kg);
    }
    return out;
}

LcaReport lifecycle_report(
    const std::vector<std::pair<BillOfMaterials, EmissionFactors>>& phases,
    const std::vector<UsageEntry>& usage) {
    if (phases.empty()) throw ArgumentError("lifecycle_report: needs at least one phase");

    LcaReport report;
    for (const auto& [bom, factors] : phases) {
        report.phases.push_back(embodied_phase(bom, factors));
        report.embodied_total_tonnes += report.phases.back().subtotal_tonnes;
    }
    for (const auto& entry : usage) {
        UsageLine line;
        line.label = entry.label;
        if (entry.direct_tonnes) {
            if (*entry.direct_tonnes < 0)
                throw ArgumentError("usage '" + entry.label + "': negative emissions");
            line.tonnes = *entry.direct_tonnes;
        } else if (entry.energy_mwh && entry.intensity_kg_per_kwh) {
            line.energy_mwh = entry.energy_mwh;
            line.intensity_kg_per_kwh = entry.intensity_kg_per_kwh;
            line.tonnes = usage_emissions(*entry.energy_mwh, *entry.intensity_kg_per_kwh);
        } else {
            throw ArgumentError("usage '" + entry.label +
                                "': needs either emissions_t or energy + intensity");
        }
        report.usage.push_back(std::move(line));
        report.usage_total_tonnes += report.usage.back().tonnes;
    }
    report.grand_total_tonnes = report.embodied_total_tonnes + report.usage_total_tonnes;
    return report;
}

void verify_report(const LcaReport& report) {
    constexpr double tol = 0.05; // half the display rounding step
    double embodied = 0;
    for (const auto& phase : report.phases) {
        double subtotal = 0;
        for (const auto& line : phase.lines) {
            double recomputed = embodied_component(line.quantity, line.factor_kg_per_unit);
            if (std::abs(recomputed - line.tonnes) > tol)
                throw ValidationError("report line '" + line.component +
                                      "' does not recompute from quantity x factor");
            subtotal += recomputed;
        }
        if (std::abs(subtotal - phase.subtotal_tonnes) > tol)
            throw ValidationError("phase '" + phase.name + "' subtotal mismatch");
        embodied += subtotal;
    }
    double usage_total = 0;
    for (const auto& line : report.usage) {
        if (line.energy_mwh && line.intensity_kg_per_kwh) {
            double recomputed = usage_emissions(*line.energy_mwh, *line.intensity_kg_per_kwh);
            if (std::abs(recomputed - line.tonnes) > tol)
                throw ValidationError("usage line '" + line.label +
                                      "' does not recompute from energy x intensity");
        }
        usage_total += line.tonnes;
    }
    if (std::abs(embodied - report.embodied_total_tonnes) > tol ||
        std::abs(usage_total - report.usage_total_tonnes) > tol ||
        std::abs(embodied + usage_total - report.grand_total_tonnes) > tol)
        throw ValidationError("report totals do not recompute from lines");
}

double manufacturing_vs_usage_ratio(const LcaReport& report, double annual_energy_mwh,
                                    double intensity_kg_per_kwh) {
    if (!(annual_energy_mwh > 0))
        throw ArgumentError("manufacturing_vs_usage_ratio: annual energy must be positive");
    double annual_tonnes = usage_emissions(annual_energy_mwh, intensity_kg_per_kwh);
    return report.embodied_total_tonnes / annual_tonnes;
}

// --- BOM files ----------------------------------------------------------------------

namespace {

struct BlockLine {
    std::string key;
    std::string value;
    std::size_t lineno;
};

// splits "Label, 42" at the last comma
std::pair<std::string, double> parse_lump(const std::string& value, std::size_t lineno) {
    auto comma = value.rfind(',');
    if (comma == std::string::npos)
        throw ParseError("lump sum needs '<label>, <value>'", lineno);
    std::string label(trim(value.substr(0, comma)));
    double v = csv::parse_double(value.substr(comma + 1), "lump sum");
    return {label, v};
}

EmissionFactors parse_factor_block(const std::vector<BlockLine>& lines) {
    EmissionFactors f;
    f.preset_name = "inline";
    for (const auto& l : lines) {
        if (l.key == "name") f.preset_name = l.value;
        else if (l.key == "per_cpu_kg") f.per_cpu_kg = csv::parse_double(l.value, l.key);
        else if (l.key == "per_node_cpu_bundle_kg")
            f.per_node_cpu_bundle_kg = csv::parse_double(l.value, l.key);
        else if (l.key == "per_gb_ddr4_kg") f.per_gb_ddr4_kg = csv::parse_double(l.value, l.key);
        else if (l.key == "per_gb_hbm2_kg") f.per_gb_hbm2_kg = csv::parse_double(l.value, l.key);
        else if (l.key == "per_gpu_kg") f.per_gpu_kg = csv::parse_double(l.value, l.key);
        else if (l.key == "per_node_interconnect_kg")
            f.per_node_interconnect_kg = csv::parse_double(l.value, l.key);
        else
            throw ParseError("unknown factors key '" + l.key + "'", l.lineno);
    }
    f.validate();
    return f;
}

} // namespace

BomFile parse_bom(std::istream& in) {
    BomFile bom;

    enum class Section { top, phase, usage, factors };
    Section section = Section::top;
    std::vector<BlockLine> factor_lines;
    BillOfMaterials* phase = nullptr;
    UsageEntry* usage = nullptr;
    std::optional<std::pair<std::string, int>> usage_mix_key;

    auto finish_usage = [&]() {
        if (usage && usage_mix_key) {
            bom.mix_refs.push_back({bom.usage.size() - 1, usage_mix_key->first,
                                    usage_mix_key->second});
            usage_mix_key.reset();
        }
        usage = nullptr;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;

        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("unterminated section header", lineno);
            auto inner = trim(t.substr(1, t.size() - 2));
            std::string label;
            std::string kind(inner);
            auto quote = inner.find('"');
            if (quote != std::string_view::npos) {
                auto end = inner.rfind('"');
                if (end == quote) throw ParseError("unterminated section label", lineno);
                label = std::string(inner.substr(quote + 1, end - quote - 1));
                kind = std::string(trim(inner.substr(0, quote)));
            }
            finish_usage();
            phase = nullptr;
            if (kind == "phase") {
                bom.phases.emplace_back();
                phase = &bom.phases.back();
                phase->phase_name = label.empty() ? "Manufacturing" : label;
                section = Section::phase;
            } else if (kind == "usage") {
                bom.usage.emplace_back();
                usage = &bom.usage.back();
                usage->label = label.empty() ? "Usage" : label;
                section = Section::usage;
            } else if (kind == "factors") {
                section = Section::factors;
            } else {
                throw ParseError("unknown section '" + kind + "'", lineno);
            }
            continue;
        }

        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", lineno);
        std::string key(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));

        switch (section) {
            case Section::top:
                if (key == "preset") bom.preset = value;
                else throw ParseError("unknown top-level key '" + key + "'", lineno);
                break;
            case Section::factors:
                factor_lines.push_back({key, value, lineno});
                break;
            case Section::phase:
                if (key == "nodes") phase->nodes = csv::parse_int(value, key);
                else if (key == "cpus_per_node")
                    phase->cpus_per_node = static_cast<int>(csv::parse_int(value, key));
                else if (key == "memory_tech")
                    phase->memory_tech = memory_tech_from_string(value);
                else if (key == "memory_gb") phase->memory_gb = csv::parse_double(value, key);
                else if (key == "gpus") phase->gpus = csv::parse_int(value, key);
                else if (key == "interconnect_nodes")
                    phase->interconnect_nodes = csv::parse_int(value, key);
                else if (key == "lump_kg")
                    phase->lump_sums_kg.push_back(parse_lump(value, lineno));
                else if (key == "lump_t") {
                    auto [label, tonnes] = parse_lump(value, lineno);
                    phase->lump_sums_kg.emplace_back(label, tonnes * 1000.0);
                } else
                    throw ParseError("unknown phase key '" + key + "'", lineno);
                break;
            case Section::usage:
                if (key == "energy_mwh") usage->energy_mwh = csv::parse_double(value, key);
                else if (key == "intensity_kg_per_kwh")
                    usage->intensity_kg_per_kwh = csv::parse_double(value, key);
                else if (key == "emissions_t")
                    usage->direct_tonnes = csv::parse_double(value, key);
                else if (key == "country")
                    usage_mix_key = {value, usage_mix_key ? usage_mix_key->second : 0};
                else if (key == "year") {
                    int y = static_cast<int>(csv::parse_int(value, key));
                    usage_mix_key = {usage_mix_key ? usage_mix_key->first : "", y};
                } else
                    throw ParseError("unknown usage key '" + key + "'", lineno);
                break;
        }
    }
    finish_usage();

    if (!factor_lines.empty()) bom.inline_factors = parse_factor_block(factor_lines);
    if (bom.preset && bom.inline_factors)
        throw ConfigError("BOM declares both a preset and inline factors");
    return bom;
}

BomFile parse_bom_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open BOM file", path);
    return parse_bom(in);
}

} // namespace hpcarbon
