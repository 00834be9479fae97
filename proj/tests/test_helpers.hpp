#pragma once

#include <string>
#include <vector>

#include "hpcarbon/edition.hpp"

namespace test_helpers {

inline hpcarbon::SystemRecord make_record(int rank, std::string name, double rmax_gflops,
                                          double rpeak_gflops,
                                          std::optional<double> power_kw = std::nullopt,
                                          hpcarbon::EditionDate date = {2021, 6},
                                          std::string country = "US") {
    hpcarbon::SystemRecord r;
    r.edition_date = date;
    r.rank = rank;
    r.name = std::move(name);
    r.site = "Site " + r.name;
    r.country = std::move(country);
    r.region = "Americas";
    r.rmax_gflops = rmax_gflops;
    r.rpeak_gflops = rpeak_gflops;
    r.power_kw = power_kw;
    return r;
}

inline std::string fixture_path(const std::string& rel) {
    return std::string(HPCARBON_FIXTURE_DIR) + "/" + rel;
}

inline std::string data_path(const std::string& rel) {
    return std::string(HPCARBON_DATA_DIR) + "/" + rel;
}

} // namespace test_helpers
