#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hpcarbon {

// Per-unit embodied-carbon factors, kgCO2eq. CPU accounting uses exactly one
// of per_cpu_kg (per CPU unit) or per_node_cpu_bundle_kg (per node).
struct EmissionFactors {
    std::string preset_name;
    std::optional<double> per_cpu_kg;
    std::optional<double> per_node_cpu_bundle_kg;
    std::optional<double> per_gb_ddr4_kg;
    std::optional<double> per_gb_hbm2_kg;
    double per_gpu_kg = 0;
    double per_node_interconnect_kg = 0;

    void validate() const;

    // Shipped presets:
    //   "paper-text"  - round-number factors from published component
    //                   estimates (250 kg per node CPU bundle, 200 kg per
    //                   64 GB DDR4, 5 kg/GB HBM2, 250 kg/GPU, 50 kg/node).
    //   "paper-table" - effective factors back-derived from published
    //                   system-level accounting tables (13 kg/CPU,
    //                   7 kg/GB HBM2, 575 kg/GPU, 50 kg/node; no DDR4
    //                   factor is derivable).
    static EmissionFactors preset(std::string_view name);
    static std::vector<std::string> preset_names();
};

enum class MemoryTech { none, ddr4, hbm2 };

std::string to_string(MemoryTech t);
MemoryTech memory_tech_from_string(std::string_view s);

// Component quantities of one build or upgrade phase.
struct BillOfMaterials {
    std::string phase_name;
    long long nodes = 0;
    int cpus_per_node = 0;
    MemoryTech memory_tech = MemoryTech::none;
    double memory_gb = 0;
    long long gpus = 0;
    long long interconnect_nodes = 0; // 0 when networking is inside a lump sum
    std::vector<std::pair<std::string, double>> lump_sums_kg;
};

// Usage-phase electricity: either metered (energy x intensity) or a direct
// emissions figure when only the total is known.
struct UsageEntry {
    std::string label;
    std::optional<double> energy_mwh;
    std::optional<double> intensity_kg_per_kwh;
    std::optional<double> direct_tonnes;
};

// --- report -----------------------------------------------------------------

// Every line keeps (quantity, factor) so the report is recomputable.
struct ReportLine {
    std::string component;
    std::string quantity_desc;
    double quantity = 0;
    double factor_kg_per_unit = 0;
    double tonnes = 0; // unrounded; round_to_tenth() for display
};

struct PhaseResult {
    std::string name;
    std::vector<ReportLine> lines;
    double subtotal_tonnes = 0; // exact sum of unrounded lines
};

struct UsageLine {
    std::string label;
    std::optional<double> energy_mwh;
    std::optional<double> intensity_kg_per_kwh;
    double tonnes = 0;
};

struct LcaReport {
    std::vector<PhaseResult> phases;
    std::vector<UsageLine> usage;
    double embodied_total_tonnes = 0;
    double usage_total_tonnes = 0;
    double grand_total_tonnes = 0;
};

// Display rounding used by the tables: 0.1 tCO2eq.
double round_to_tenth(double tonnes);

// quantity x factor / 1000, in tonnes (unrounded).
double embodied_component(double quantity, double factor_kg_per_unit);

// energy MWh x intensity kg/kWh = tonnes.
double usage_emissions(double energy_mwh, double intensity_kg_per_kwh);

PhaseResult embodied_phase(const BillOfMaterials& bom, const EmissionFactors& factors);

LcaReport lifecycle_report(
    const std::vector<std::pair<BillOfMaterials, EmissionFactors>>& phases,
    const std::vector<UsageEntry>& usage);

// Recomputes every line and total from stored (quantity, factor); throws
// ValidationError on any mismatch beyond display rounding.
void verify_report(const LcaReport& report);

// Embodied subtotal expressed as years of usage at the given annual energy
// and intensity.
double manufacturing_vs_usage_ratio(const LcaReport& report, double annual_energy_mwh,
                                    double intensity_kg_per_kwh);

// --- BOM files -----------------------------------------------------------------

// Key-value text with repeated [phase "..."] and [usage "..."] blocks, an
// optional [factors] block, and a top-level `preset = <name>` line.
struct BomFile {
    std::optional<std::string> preset;
    std::optional<EmissionFactors> inline_factors;
    std::vector<BillOfMaterials> phases;
    std::vector<UsageEntry> usage;

    struct MixRef { // usage entries resolved against a mix table
        std::size_t usage_index;
        std::string country;
        int year;
    };
    std::vector<MixRef> mix_refs;
};

BomFile parse_bom(std::istream& in);
BomFile parse_bom_file(const std::string& path);

} // namespace hpcarbon
