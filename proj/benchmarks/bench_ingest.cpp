#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "hpcarbon/ingest.hpp"

using namespace hpcarbon;

namespace {

std::string synthetic_export(int rows) {
    std::ostringstream out;
    out << "Rank,Name,Site,Country,Rmax,Rpeak,Power,Total Cores,Accelerator\n";
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> perf(100.0, 500000.0);
    for (int i = 1; i <= rows; ++i) {
        double rpeak = perf(gen);
        out << i << ",System " << i << ",Site " << (i % 37) << ",United States,"
            << rpeak * 0.75 << "," << rpeak << "," << 100 + i << "," << i * 1000
            << ",None\n";
    }
    return out.str();
}

std::vector<Edition> synthetic_editions(int n_editions, int rows) {
    const RegionMap regions = RegionMap::builtin_default();
    UnitHints units{PerfUnit::tflops, PerfUnit::tflops, PowerUnit::kw};
    std::vector<Edition> editions;
    int year = 2010, month = 6;
    for (int e = 0; e < n_editions; ++e) {
        std::istringstream in(synthetic_export(rows));
        EditionDate date(year, month);
        Edition ed{date, {}};
        for (const auto& raw : parse_edition(in, date))
            ed.records.push_back(normalize(raw, units, regions));
        editions.push_back(std::move(ed));
        if (month == 6) month = 11;
        else { month = 6; ++year; }
    }
    return editions;
}

} // namespace

static void BM_ParseAndNormalize(benchmark::State& state) {
    const std::string text = synthetic_export(500);
    const RegionMap regions = RegionMap::builtin_default();
    UnitHints units{PerfUnit::tflops, PerfUnit::tflops, PowerUnit::kw};
    for (auto _ : state) {
        std::istringstream in(text);
        std::vector<SystemRecord> records;
        for (const auto& raw : parse_edition(in, EditionDate(2021, 6)))
            records.push_back(normalize(raw, units, regions));
        benchmark::DoNotOptimize(records);
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_ParseAndNormalize);

static void BM_FilterEdition(benchmark::State& state) {
    auto editions = synthetic_editions(1, 500);
    FilterPolicy policy;
    for (auto _ : state) {
        auto result = filter_edition(editions[0].records, policy);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_FilterEdition);

static void BM_ResolveIdentities(benchmark::State& state) {
    auto editions = synthetic_editions(static_cast<int>(state.range(0)), 500);
    for (auto _ : state) {
        auto histories = resolve_identities(editions);
        benchmark::DoNotOptimize(histories);
    }
}
BENCHMARK(BM_ResolveIdentities)->Arg(10)->Arg(40);

BENCHMARK_MAIN();
