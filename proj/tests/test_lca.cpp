#include <doctest.h>

#include <random>
#include <sstream>

#include "hpcarbon/errors.hpp"
#include "hpcarbon/lca.hpp"
#include "test_helpers.hpp"

using namespace hpcarbon;

namespace {

BillOfMaterials fugaku_bom() {
    BillOfMaterials bom;
    bom.phase_name = "Manufacturing";
    bom.nodes = 158'976;
    bom.cpus_per_node = 48;
    bom.memory_tech = MemoryTech::hbm2;
    bom.memory_gb = 5'087'232;
    bom.interconnect_nodes = 158'976;
    return bom;
}

double line_tonnes(const PhaseResult& phase, const std::string& component) {
    for (const auto& line : phase.lines)
        if (line.component == component) return line.tonnes;
    FAIL("missing line: " << component);
    return 0;
}

} // namespace

TEST_CASE("embodied component is quantity times factor") {
    CHECK(embodied_component(158'976, 50.0) == doctest::Approx(7'948.8));
    CHECK(round_to_tenth(embodied_component(5'087'232, 5.0)) == doctest::Approx(25'436.2));
    CHECK(embodied_component(0, 123.0) == 0.0);
    CHECK(embodied_component(1'656, 50.0) == doctest::Approx(82.8));
    CHECK_THROWS_AS(embodied_component(-1, 1.0), ArgumentError);
    CHECK_THROWS_AS(embodied_component(1, -1.0), ArgumentError);
}

TEST_CASE("the published CPU line implies 13 kg per CPU") {
    // derive the factor from the published totals, then check it against
    // all three CPU lines
    double implied = 99'201.0 * 1000.0 / (158'976.0 * 48.0);
    CHECK(implied == doctest::Approx(13.0).epsilon(1e-4));

    CHECK(embodied_component(158'976.0 * 48.0, 13.0) == doctest::Approx(99'201.0).epsilon(1e-5));
    CHECK(round_to_tenth(embodied_component(1'656.0 * 28.0, 13.0)) ==
          doctest::Approx(602.8));
    CHECK(round_to_tenth(embodied_component(2'292.0 * 28.0, 13.0)) ==
          doctest::Approx(834.3));
}

TEST_CASE("factor presets") {
    auto text = EmissionFactors::preset("paper-text");
    CHECK(*text.per_node_cpu_bundle_kg == 250.0);
    CHECK(*text.per_gb_ddr4_kg == doctest::Approx(3.125));
    CHECK(*text.per_gb_hbm2_kg == 5.0);
    CHECK(text.per_gpu_kg == 250.0);
    CHECK_FALSE(text.per_cpu_kg.has_value());

    auto table = EmissionFactors::preset("paper-table");
    CHECK(*table.per_cpu_kg == 13.0);
    CHECK(*table.per_gb_hbm2_kg == 7.0);
    CHECK(table.per_gpu_kg == 575.0);
    CHECK_FALSE(table.per_gb_ddr4_kg.has_value());

    CHECK_THROWS_AS(EmissionFactors::preset("nope"), ConfigError);

    EmissionFactors both = table;
    both.per_node_cpu_bundle_kg = 1.0;
    CHECK_THROWS_AS(both.validate(), ConfigError);
}

TEST_CASE("phase breakdown under the table-derived factors") {
    auto phase = embodied_phase(fugaku_bom(), EmissionFactors::preset("paper-table"));
    CHECK(line_tonnes(phase, "CPUs") == doctest::Approx(99'201.024));
    CHECK(line_tonnes(phase, "Memory (HBM2)") == doctest::Approx(35'610.624));
    CHECK(line_tonnes(phase, "Interconnect + Other") == doctest::Approx(7'948.8));
    CHECK(phase.subtotal_tonnes == doctest::Approx(142'760.448));
}

TEST_CASE("per-node CPU accounting under the text factors") {
    BillOfMaterials bom;
    bom.phase_name = "Manufacturing";
    bom.nodes = 1'656;
    bom.cpus_per_node = 28;
    auto phase = embodied_phase(bom, EmissionFactors::preset("paper-text"));
    // bundle accounting multiplies nodes, not CPUs
    CHECK(line_tonnes(phase, "CPUs") == doctest::Approx(1'656 * 250.0 / 1000.0));
}

TEST_CASE("empty BOM produces an empty phase") {
    BillOfMaterials bom;
    bom.phase_name = "Empty";
    auto phase = embodied_phase(bom, EmissionFactors::preset("paper-table"));
    CHECK(phase.lines.empty());
    CHECK(phase.subtotal_tonnes == 0.0);
}

TEST_CASE("missing memory factor is a configuration error") {
    BillOfMaterials bom;
    bom.phase_name = "M";
    bom.memory_tech = MemoryTech::ddr4;
    bom.memory_gb = 64;
    CHECK_THROWS_AS(embodied_phase(bom, EmissionFactors::preset("paper-table")),
                    ConfigError);
    CHECK(embodied_phase(bom, EmissionFactors::preset("paper-text")).subtotal_tonnes ==
          doctest::Approx(0.2));
}

TEST_CASE("usage emissions arithmetic") {
    CHECK(usage_emissions(1'713'600.0, 0.220) == 376'992.0);
    CHECK(usage_emissions(0.0, 0.3) == 0.0);
    CHECK(usage_emissions(1'000.0, 0.300) == doctest::Approx(300.0));
    CHECK_THROWS_AS(usage_emissions(-1.0, 0.3), ArgumentError);
    CHECK_THROWS_AS(usage_emissions(1.0, 0.0), ArgumentError);
}

TEST_CASE("lifecycle report reproduces the published totals") {
    auto factors = EmissionFactors::preset("paper-table");

    UsageEntry fugaku_usage;
    fugaku_usage.label = "Energy Consumption (7 years)";
    fugaku_usage.energy_mwh = 1'713'600.0;
    fugaku_usage.intensity_kg_per_kwh = 0.220;
    auto fugaku = lifecycle_report({{fugaku_bom(), factors}}, {fugaku_usage});
    CHECK(fugaku.embodied_total_tonnes == doctest::Approx(142'761.0).epsilon(1e-5));
    CHECK(fugaku.usage_total_tonnes == 376'992.0);
    CHECK(fugaku.grand_total_tonnes == doctest::Approx(519'753.0).epsilon(1e-5));
    verify_report(fugaku);

    BillOfMaterials skylake;
    skylake.phase_name = "Manufacturing (Skylake)";
    skylake.nodes = 1'656;
    skylake.cpus_per_node = 28;
    skylake.lump_sums_kg = {{"Memory + Network", 2'231'000.0},
                            {"Other Components", 508'000.0}};
    BillOfMaterials upgrade;
    upgrade.phase_name = "Manufacturing (Irene Rome & V100)";
    upgrade.nodes = 2'292;
    upgrade.cpus_per_node = 28;
    upgrade.gpus = 128;
    upgrade.lump_sums_kg = {{"Other Components", 2'231'000.0}};

    UsageEntry u1{"Usage (Skylake, 2 years)", std::nullopt, std::nullopt, 508.0};
    UsageEntry u2{"Usage (Irene Rome & V100, 5 years)", std::nullopt, std::nullopt, 1'863.0};

    auto curie = lifecycle_report({{skylake, factors}, {upgrade, factors}}, {u1, u2});
    CHECK(curie.phases[0].subtotal_tonnes == doctest::Approx(3'342.0).epsilon(2e-4));
    CHECK(curie.phases[1].subtotal_tonnes == doctest::Approx(3'139.1).epsilon(2e-4));
    CHECK(curie.grand_total_tonnes == doctest::Approx(8'852.1).epsilon(2e-4));
    verify_report(curie);

    // the upgrade phase roughly doubles the embodied half of the footprint
    CHECK(curie.phases[1].subtotal_tonnes / curie.phases[0].subtotal_tonnes ==
          doctest::Approx(1.0).epsilon(0.10));

    CHECK_THROWS_AS(lifecycle_report({}, {}), ArgumentError);

    BillOfMaterials empty;
    empty.phase_name = "Zero";
    auto zero = lifecycle_report({{empty, factors}}, {});
    CHECK(zero.grand_total_tonnes == 0.0);
}

TEST_CASE("report additivity and linearity") {
    auto factors = EmissionFactors::preset("paper-table");
    BillOfMaterials a = fugaku_bom();
    BillOfMaterials b;
    b.phase_name = "Upgrade";
    b.nodes = 2'292;
    b.cpus_per_node = 28;
    b.gpus = 128;

    auto joint = lifecycle_report({{a, factors}, {b, factors}}, {});
    auto only_a = lifecycle_report({{a, factors}}, {});
    auto only_b = lifecycle_report({{b, factors}}, {});
    CHECK(joint.grand_total_tonnes ==
          doctest::Approx(only_a.grand_total_tonnes + only_b.grand_total_tonnes)
              .epsilon(1e-12));

    // scaling every quantity scales every line and subtotal
    const double c = 3.0;
    BillOfMaterials scaled = a;
    scaled.nodes *= 3;
    scaled.memory_gb *= 3;
    scaled.interconnect_nodes *= 3;
    auto scaled_phase = embodied_phase(scaled, factors);
    auto base_phase = embodied_phase(a, factors);
    CHECK(scaled_phase.subtotal_tonnes ==
          doctest::Approx(c * base_phase.subtotal_tonnes).epsilon(1e-12));
    for (std::size_t i = 0; i < base_phase.lines.size(); ++i)
        CHECK(scaled_phase.lines[i].tonnes ==
              doctest::Approx(c * base_phase.lines[i].tonnes).epsilon(1e-12));
}

TEST_CASE("verify_report rejects tampered lines") {
    auto factors = EmissionFactors::preset("paper-table");
    auto report = lifecycle_report({{fugaku_bom(), factors}}, {});
    report.phases[0].lines[0].tonnes += 1.0;
    CHECK_THROWS_AS(verify_report(report), ValidationError);
}

TEST_CASE("embodied footprint expressed in years of usage") {
    auto factors = EmissionFactors::preset("paper-table");
    UsageEntry usage{"Usage", 1'713'600.0, 0.220, std::nullopt};
    auto report = lifecycle_report({{fugaku_bom(), factors}}, {usage});

    // 7-year energy spread over one year, at the reference 0.300 kg/kWh
    double years = manufacturing_vs_usage_ratio(report, 1'713'600.0 / 7.0, 0.300);
    CHECK(years == doctest::Approx(1.94).epsilon(5e-3));

    CHECK(manufacturing_vs_usage_ratio(report, 244'800.0, 0.150) ==
          doctest::Approx(2.0 * years).epsilon(1e-9));
    CHECK_THROWS_AS(manufacturing_vs_usage_ratio(report, 0.0, 0.3), ArgumentError);

    BillOfMaterials empty;
    empty.phase_name = "Zero";
    auto zero = lifecycle_report({{empty, factors}}, {});
    CHECK(manufacturing_vs_usage_ratio(zero, 100.0, 0.3) == 0.0);
}

TEST_CASE("BOM files parse into phases and usage") {
    std::istringstream in(
        "preset = paper-table\n"
        "\n"
        "[phase \"Manufacturing\"]\n"
        "nodes = 10\n"
        "cpus_per_node = 2\n"
        "lump_t = Chassis, 1.5\n"
        "lump_kg = Cables, 250\n"
        "\n"
        "[usage \"Year 1\"]\n"
        "energy_mwh = 100\n"
        "intensity_kg_per_kwh = 0.3\n"
        "\n"
        "[usage \"Year 2\"]\n"
        "emissions_t = 42\n");
    auto bom = parse_bom(in);
    CHECK(*bom.preset == "paper-table");
    REQUIRE(bom.phases.size() == 1);
    CHECK(bom.phases[0].nodes == 10);
    REQUIRE(bom.phases[0].lump_sums_kg.size() == 2);
    CHECK(bom.phases[0].lump_sums_kg[0].second == 1500.0);
    CHECK(bom.phases[0].lump_sums_kg[1].second == 250.0);
    REQUIRE(bom.usage.size() == 2);
    CHECK(*bom.usage[0].energy_mwh == 100.0);
    CHECK(*bom.usage[1].direct_tonnes == 42.0);
}

TEST_CASE("BOM usage can reference the mix by country and year") {
    std::istringstream in(
        "[phase \"M\"]\n"
        "nodes = 1\n"
        "cpus_per_node = 1\n"
        "[usage \"U\"]\n"
        "energy_mwh = 100\n"
        "country = JP\n"
        "year = 2020\n");
    auto bom = parse_bom(in);
    REQUIRE(bom.mix_refs.size() == 1);
    CHECK(bom.mix_refs[0].country == "JP");
    CHECK(bom.mix_refs[0].year == 2020);
}

TEST_CASE("BOM files with inline factors") {
    std::istringstream in(
        "[factors]\n"
        "name = custom\n"
        "per_cpu_kg = 10\n"
        "per_gpu_kg = 100\n"
        "[phase \"M\"]\n"
        "nodes = 2\n"
        "cpus_per_node = 4\n");
    auto bom = parse_bom(in);
    REQUIRE(bom.inline_factors.has_value());
    auto phase = embodied_phase(bom.phases[0], *bom.inline_factors);
    CHECK(phase.subtotal_tonnes == doctest::Approx(0.08));

    std::istringstream conflicting("preset = paper-table\n[factors]\nper_cpu_kg = 1\n");
    CHECK_THROWS_AS(parse_bom(conflicting), ConfigError);

    std::istringstream bad_key("[phase \"M\"]\nnodez = 1\n");
    CHECK_THROWS_AS(parse_bom(bad_key), ParseError);
}

TEST_CASE("shipped BOM files load") {
    auto fugaku = parse_bom_file(test_helpers::data_path("fugaku.bom"));
    CHECK(*fugaku.preset == "paper-table");
    CHECK(fugaku.phases.size() == 1);
    CHECK(fugaku.usage.size() == 1);

    auto curie = parse_bom_file(test_helpers::data_path("curie.bom"));
    CHECK(curie.phases.size() == 2);
    CHECK(curie.usage.size() == 2);
}
