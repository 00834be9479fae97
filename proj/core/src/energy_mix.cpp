#include "hpcarbon/energy_mix.hpp"

#include <fstream>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/errors.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon {

std::string to_string(MixResolution r) {
    switch (r) {
        case MixResolution::exact: return "exact";
        case MixResolution::nearest_earlier_year: return "nearest_earlier_year";
        case MixResolution::default_value: return "default";
    }
    return "default";
}

namespace {
void check_intensity(double v, const std::string& context) {
    if (!(v > 0) || v > EnergyMixTable::kMaxIntensity)
        throw ValidationError("intensity " + csv::format_double(v) + " outside (0, " +
                              csv::format_double(EnergyMixTable::kMaxIntensity) + "] " +
                              context);
}
} // namespace

EnergyMixTable::EnergyMixTable(double default_intensity)
    : default_intensity_(default_intensity) {
    check_intensity(default_intensity_, "for default_intensity");
}

void EnergyMixTable::insert(std::string_view country, int year, double kg_per_kwh) {
    check_intensity(kg_per_kwh, "for (" + std::string(country) + ", " +
                                    std::to_string(year) + ")");
    entries_[{to_upper(trim(country)), year}] = kg_per_kwh;
}

EnergyMixTable EnergyMixTable::load(std::istream& in, double default_intensity,
                                    std::vector<std::string>* warnings) {
    EnergyMixTable table(default_intensity);
    csv::ReadOptions opts;
    opts.allow_comments = true;
    opts.has_header = false;
    csv::Table rows = csv::read(in, opts);
    std::size_t rowno = 0;
    for (const auto& row : rows.rows) {
        ++rowno;
        if (row.size() != 3)
            throw ValidationError("mix row " + std::to_string(rowno) +
                                  " needs country,year,intensity");
        // skip a header row if present
        if (rowno == 1 && to_lower(trim(row[0])) == "country") continue;
        std::string country = to_upper(trim(row[0]));
        int year = static_cast<int>(csv::parse_int(row[1], "year"));
        double v = csv::parse_double(row[2], "intensity");
        if (!(v > 0) || v > kMaxIntensity)
            throw ValidationError("intensity " + csv::format_double(v) + " outside (0, 2] at mix row " +
                                  std::to_string(rowno) + " (" + country + "," + row[1] + ")");
        auto key = std::make_pair(country, year);
        if (warnings && table.entries_.count(key))
            warnings->push_back("duplicate mix entry (" + country + ", " + row[1] +
                                "): last value wins");
        table.entries_[key] = v;
    }
    return table;
}

EnergyMixTable EnergyMixTable::load_file(const std::string& path, double default_intensity,
                                         std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open mix file", path);
    return load(in, default_intensity, warnings);
}

IntensityResult EnergyMixTable::intensity(std::string_view country, int year) const {
    if (year < 1993 || year > 2035)
        throw ArgumentError("mix lookup year " + std::to_string(year) +
                            " outside [1993, 2035]");
    std::string c = to_upper(trim(country));

    if (auto it = entries_.find({c, year}); it != entries_.end())
        return {it->second, MixResolution::exact, year};

    // nearest earlier year for the same country
    auto it = entries_.lower_bound({c, year});
    if (it != entries_.begin()) {
        --it;
        if (it->first.first == c)
            return {it->second, MixResolution::nearest_earlier_year, it->first.second};
    }
    return {default_intensity_, MixResolution::default_value, 0};
}

} // namespace hpcarbon
