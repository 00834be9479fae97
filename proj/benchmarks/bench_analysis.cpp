#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "hpcarbon/lca.hpp"
#include "hpcarbon/metrics.hpp"
#include "hpcarbon/trends.hpp"

using namespace hpcarbon;

static void BM_FitExponential(benchmark::State& state) {
    TimeSeries series;
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> jitter(0.95, 1.05);
    const auto n = state.range(0);
    for (int i = 0; i < n; ++i) {
        double t = 2000.0 + 0.5 * i;
        series.points.push_back({t, std::exp2((t - 2000.0) / 2.83) * jitter(gen)});
    }
    for (auto _ : state) {
        auto fit = fit_exponential(series);
        benchmark::DoNotOptimize(fit);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FitExponential)->Arg(50)->Arg(1000);

static void BM_EditionSummary(benchmark::State& state) {
    std::vector<SystemRecord> edition;
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> perf(1000.0, 500000.0);
    for (int i = 1; i <= 500; ++i) {
        SystemRecord r;
        r.edition_date = {2022, 6};
        r.rank = i;
        r.name = "System " + std::to_string(i);
        r.country = "US";
        r.rpeak_gflops = perf(gen);
        r.rmax_gflops = r.rpeak_gflops * 0.7;
        r.power_kw = 100.0 + i;
        edition.push_back(std::move(r));
    }
    EnergyMixTable mix(0.300);
    for (auto _ : state) {
        auto summary = edition_summary(edition, mix);
        benchmark::DoNotOptimize(summary);
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_EditionSummary);

static void BM_LifecycleReport(benchmark::State& state) {
    BillOfMaterials bom;
    bom.phase_name = "Manufacturing";
    bom.nodes = 158'976;
    bom.cpus_per_node = 48;
    bom.memory_tech = MemoryTech::hbm2;
    bom.memory_gb = 5'087'232;
    bom.interconnect_nodes = 158'976;
    auto factors = EmissionFactors::preset("paper-table");
    UsageEntry usage{"Usage", 1'713'600.0, 0.220, std::nullopt};
    for (auto _ : state) {
        auto report = lifecycle_report({{bom, factors}}, {usage});
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_LifecycleReport);

BENCHMARK_MAIN();
