#include <doctest.h>

#include <random>
#include <sstream>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/metrics.hpp"
#include "test_helpers.hpp"

using namespace hpcarbon;
using test_helpers::make_record;

namespace {

EnergyMixTable flat_mix(double intensity) {
    return EnergyMixTable(intensity);
}

} // namespace

TEST_CASE("linpack ratio basics") {
    auto identity = linpack_ratio({make_record(1, "A", 5.0, 5.0)});
    CHECK(identity.mean == 1.0);
    CHECK(identity.max == 1.0);

    auto two = linpack_ratio({make_record(1, "A", 6.0, 10.0), make_record(2, "B", 8.0, 10.0)});
    CHECK(two.mean == doctest::Approx(0.7));
    CHECK(two.max == doctest::Approx(0.8));

    CHECK_THROWS_AS(linpack_ratio({}), EmptyInputError);
}

TEST_CASE("linpack ratio mean equals a naive oracle") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    std::vector<SystemRecord> edition;
    double naive = 0;
    for (int i = 0; i < 10; ++i) {
        double rpeak = 100.0 + i, ratio = u(gen);
        edition.push_back(make_record(i + 1, "S" + std::to_string(i), rpeak * ratio, rpeak));
        naive += edition.back().rmax_gflops / edition.back().rpeak_gflops;
    }
    CHECK(linpack_ratio(edition).mean == doctest::Approx(naive / 10.0).epsilon(1e-12));
}

TEST_CASE("power efficiency unit arithmetic") {
    // 1 PFLOP/s at 1 MW is 1 GFLOPS/W
    auto r = power_efficiency({make_record(1, "A", 1'000'000.0, 2'000'000.0, 1000.0)});
    CHECK(r.mean == doctest::Approx(1.0));
    CHECK(r.max == doctest::Approx(1.0));

    CHECK_THROWS_AS(power_efficiency({make_record(1, "A", 1.0, 2.0)}), ContractViolation);
}

TEST_CASE("annual energy uses an 8760-hour year") {
    CHECK(annual_energy({make_record(1, "A", 1.0, 2.0, 1000.0)}) == doctest::Approx(8760.0));
    CHECK(annual_energy({make_record(1, "A", 1.0, 2.0, 28'000.0)}) ==
          doctest::Approx(245'280.0));
}

TEST_CASE("annual energy top-k selection matches a brute force") {
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> p(10.0, 30'000.0);
    std::vector<SystemRecord> edition;
    for (int i = 0; i < 30; ++i)
        edition.push_back(make_record(i + 1, "S" + std::to_string(i), 10.0, 20.0, p(gen)));
    std::shuffle(edition.begin(), edition.end(), gen);

    double naive = 0;
    for (const auto& r : edition)
        if (r.rank <= 25) naive += *r.power_kw * 8760.0 / 1000.0;
    naive /= 25.0;

    CHECK(annual_energy(edition, 25) == doctest::Approx(naive).epsilon(1e-12));
    CHECK_THROWS_AS(annual_energy(edition, 0), ArgumentError);
    CHECK_THROWS_AS(annual_energy(edition, 31), ArgumentError);
}

TEST_CASE("carbon efficiency dimensional anchor") {
    // 30 GFLOPS/W on a 0.300 kg/kWh grid: 3.6e8 GFLOP per kg
    CHECK(carbon_efficiency_value(30.0, 0.300) == 3.6e8);
    // constants cancel at 1 GFLOPS/W and 3.6 kg/kWh
    CHECK(carbon_efficiency_value(1.0, 3.6) == doctest::Approx(1e6));
}

TEST_CASE("carbon efficiency is inverse in intensity, linear in rmax") {
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    for (int i = 0; i < 100; ++i) {
        double eff = u(gen), intensity = u(gen) / 30.0;
        CHECK(carbon_efficiency_value(eff, intensity / 2.0) ==
              2.0 * carbon_efficiency_value(eff, intensity));
        CHECK(carbon_efficiency_value(3.0 * eff, intensity) ==
              doctest::Approx(3.0 * carbon_efficiency_value(eff, intensity)));
    }

    auto rec = make_record(1, "A", 30'000'000.0, 40'000'000.0, 1000.0, {2021, 6}, "US");
    CHECK(carbon_efficiency(rec, flat_mix(0.300)) == 3.6e8);
    CHECK_THROWS_AS(carbon_efficiency(make_record(1, "B", 1.0, 2.0), flat_mix(0.3)),
                    ContractViolation);
}

TEST_CASE("edition summary composes the individual statistics") {
    auto mix = flat_mix(0.300);

    auto single = edition_summary({make_record(1, "A", 100.0, 200.0, 50.0)}, mix);
    CHECK(single.mean_linpack_ratio == single.max_linpack_ratio);
    CHECK(single.mean_rmax_gflops == 100.0);
    CHECK(*single.mean_efficiency == *single.max_efficiency);

    std::vector<SystemRecord> edition = {
        make_record(1, "A", 1000.0, 2000.0, 100.0),
        make_record(2, "B", 500.0, 1000.0),
        make_record(3, "C", 400.0, 500.0, 50.0),
        make_record(4, "D", 300.0, 900.0),
    };
    auto s = edition_summary(edition, mix);
    CHECK(s.ratio_count == 4);
    CHECK(s.power_count == 2); // half the records lack power
    CHECK(s.carbon_count == 2);

    // max statistics dominate their means
    CHECK(s.max_linpack_ratio >= s.mean_linpack_ratio);
    CHECK(s.max_rmax_gflops >= s.mean_rmax_gflops);
    CHECK(*s.max_efficiency >= *s.mean_efficiency);
    CHECK(*s.max_carbon_efficiency >= *s.mean_carbon_efficiency);
    CHECK(s.max_linpack_ratio <= 1.0);

    std::vector<SystemRecord> powered = {edition[0], edition[2]};
    CHECK(s.mean_linpack_ratio == doctest::Approx(linpack_ratio(edition).mean));
    CHECK(*s.mean_efficiency == doctest::Approx(power_efficiency(powered).mean));
    CHECK(*s.max_efficiency == doctest::Approx(power_efficiency(powered).max));
    CHECK(*s.mean_annual_energy_all_mwh == doctest::Approx(annual_energy(powered)));
    double cmean = (carbon_efficiency(powered[0], mix) + carbon_efficiency(powered[1], mix)) / 2;
    CHECK(*s.mean_carbon_efficiency == doctest::Approx(cmean));

    CHECK_THROWS_AS(edition_summary({}, mix), EmptyInputError);
}

namespace {

SystemHistory make_history(std::string key, int first_year, int n_editions, int best_rank,
                           std::string country = "US") {
    SystemHistory h;
    h.identity_key = std::move(key);
    h.country = std::move(country);
    h.first_apparition = EditionDate(first_year, 6);
    h.best_rank = best_rank;
    int month = 6, year = first_year;
    for (int i = 0; i < n_editions; ++i) {
        h.editions.push_back({EditionDate(year, month), best_rank, 100.0});
        if (month == 6) month = 11;
        else { month = 6; ++year; }
    }
    return h;
}

} // namespace

TEST_CASE("presence groups are nested and means match the definition") {
    auto h = make_history("a|x", 2020, 3, 3);
    auto table = presence_by_group({h});
    REQUIRE(table.count(2020) == 1);
    // best rank 3 lands in all three nested groups with the same value
    for (int g : {5, 50, 500}) {
        REQUIRE(table[2020].count(g) == 1);
        CHECK(table[2020][g].mean_presence_years == 1.5);
    }
}

TEST_CASE("presence by group matches hand-computed means") {
    std::vector<SystemHistory> histories = {
        make_history("a|x", 2020, 3, 3),   // groups 5/50/500, 1.5y
        make_history("b|x", 2020, 1, 40),  // groups 50/500, 0.5y
        make_history("c|x", 2020, 4, 200), // group 500, 2.0y
        make_history("d|x", 2021, 2, 2),   // groups 5/50/500, 1.0y
        make_history("e|x", 2021, 6, 450), // group 500, 3.0y
    };
    auto table = presence_by_group(histories);

    CHECK(table[2020][5].mean_presence_years == doctest::Approx(1.5));
    CHECK(table[2020][5].count == 1);
    CHECK(table[2020][50].mean_presence_years == doctest::Approx((1.5 + 0.5) / 2));
    CHECK(table[2020][500].mean_presence_years == doctest::Approx((1.5 + 0.5 + 2.0) / 3));
    CHECK(table[2021][5].mean_presence_years == doctest::Approx(1.0));
    CHECK(table[2021][50].mean_presence_years == doctest::Approx(1.0));
    CHECK(table[2021][500].mean_presence_years == doctest::Approx((1.0 + 3.0) / 2));

    // nesting: group populations grow with the threshold
    for (const auto& [year, groups] : table) {
        CHECK(groups.at(5).count <= groups.at(50).count);
        CHECK(groups.at(50).count <= groups.at(500).count);
    }

    CHECK(mean_presence_years(histories) ==
          doctest::Approx((1.5 + 0.5 + 2.0 + 1.0 + 3.0) / 5));
    CHECK_THROWS_AS(presence_by_group({}), EmptyInputError);
}

TEST_CASE("new systems count once in their first-apparition year") {
    std::vector<SystemHistory> histories = {
        make_history("a|x", 2020, 3, 3, "US"),
        make_history("b|x", 2020, 1, 40, "JP"),
        make_history("c|x", 2020, 4, 200, "FR"),
        make_history("d|x", 2021, 2, 2, "Atlantis"),
    };
    auto counts = new_systems_by_region(histories, RegionMap::builtin_default());
    CHECK(counts[2020]["Americas"] == 1);
    CHECK(counts[2020]["East Asia"] == 1);
    CHECK(counts[2020]["Europe"] == 1);
    CHECK(counts[2021]["Other"] == 1); // unknown country aggregates under Other

    int total = 0;
    for (const auto& [year, regions] : counts)
        for (const auto& [region, n] : regions) total += n;
    CHECK(total == static_cast<int>(histories.size()));
}

namespace {

UtilizationTrace trace_of(std::vector<std::pair<int, double>> day_values) {
    UtilizationTrace t;
    t.system_name = "test";
    for (auto [day, v] : day_values)
        t.samples.emplace_back(csv::parse_iso8601("2021-01-01") +
                                   std::chrono::hours(24 * day),
                               v);
    return t;
}

} // namespace

TEST_CASE("utilization of constant traces") {
    auto full = utilization_summary(trace_of({{0, 1.0}, {5, 1.0}, {10, 1.0}}));
    CHECK(full.mean_utilization == 1.0);
    CHECK(full.fraction_below_threshold == 0.0);
    CHECK(full.longest_low_streak_days == 0.0);

    auto low = utilization_summary(trace_of({{0, 0.2}, {5, 0.2}, {10, 0.2}}));
    CHECK(low.mean_utilization == doctest::Approx(0.2));
    CHECK(low.fraction_below_threshold == 1.0);
    CHECK(low.longest_low_streak_days == doctest::Approx(10.0));
}

TEST_CASE("utilization two-level trace matches interval arithmetic") {
    // 2 days at 0.9, 3 days at 0.4, 5 days at 0.8
    auto s = utilization_summary(trace_of({{0, 0.9}, {2, 0.4}, {5, 0.8}, {10, 0.3}}));
    CHECK(s.mean_utilization == doctest::Approx((2 * 0.9 + 3 * 0.4 + 5 * 0.8) / 10.0));
    CHECK(s.fraction_below_threshold == doctest::Approx(0.3));
    CHECK(s.longest_low_streak_days == doctest::Approx(3.0));

    CHECK_THROWS_AS(utilization_summary(trace_of({{0, 0.5}})), InsufficientDataError);
}

TEST_CASE("trace files parse and validate") {
    std::istringstream in("timestamp,utilization\n2021-01-01T00:00:00,0.9\n"
                          "2021-01-02T00:00:00,0.4\n");
    auto trace = load_trace(in, "alpha");
    CHECK(trace.samples.size() == 2);

    std::istringstream bad("2021-01-02T00:00:00,0.4\n2021-01-01T00:00:00,0.9\n");
    CHECK_THROWS_AS(load_trace(bad, "x"), ValidationError);
    std::istringstream out_of_range("2021-01-01T00:00:00,1.5\n");
    CHECK_THROWS_AS(load_trace(out_of_range, "x"), ValidationError);
}

TEST_CASE("scaling rmax and rpeak together leaves ratios invariant") {
    std::mt19937 gen(29);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    std::vector<SystemRecord> edition, scaled;
    const double c = 7.5;
    for (int i = 0; i < 20; ++i) {
        double rpeak = 50.0 + 10.0 * i, ratio = u(gen);
        auto r = make_record(i + 1, "S" + std::to_string(i), rpeak * ratio, rpeak, 100.0);
        edition.push_back(r);
        r.rmax_gflops *= c;
        r.rpeak_gflops *= c;
        scaled.push_back(r);
    }
    auto base = linpack_ratio(edition), after = linpack_ratio(scaled);
    CHECK(after.mean == doctest::Approx(base.mean).epsilon(1e-12));
    CHECK(after.max == doctest::Approx(base.max).epsilon(1e-12));

    // efficiency scales linearly with rmax
    auto eff_base = power_efficiency(edition), eff_after = power_efficiency(scaled);
    CHECK(eff_after.mean == doctest::Approx(c * eff_base.mean).epsilon(1e-12));
}
