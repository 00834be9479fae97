#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hpcarbon {

// How a grid-intensity lookup was satisfied.
enum class MixResolution { exact, nearest_earlier_year, default_value };

std::string to_string(MixResolution r);

struct IntensityResult {
    double kg_per_kwh = 0;
    MixResolution resolution = MixResolution::default_value;
    int resolved_year = 0; // year of the entry used; 0 for the default
};

// Grid carbon intensity per (country, year), in kgCO2eq/kWh.
// Immutable after load; every intensity lies in (0, 2].
class EnergyMixTable {
public:
    static constexpr double kMaxIntensity = 2.0;
    static constexpr double kDefaultIntensity = 0.300;

    explicit EnergyMixTable(double default_intensity = kDefaultIntensity);

    // Rows are country,year,intensity_kg_per_kwh; '#' lines are comments.
    // Duplicate (country, year) rows: last one wins, with a warning appended
    // to `warnings` when given.
    static EnergyMixTable load(std::istream& in,
                               double default_intensity = kDefaultIntensity,
                               std::vector<std::string>* warnings = nullptr);
    static EnergyMixTable load_file(const std::string& path,
                                    double default_intensity = kDefaultIntensity,
                                    std::vector<std::string>* warnings = nullptr);

    void insert(std::string_view country, int year, double kg_per_kwh);

    // Exact entry if present; else the nearest earlier year for the country;
    // else the default. Total within year range [1993, 2035].
    IntensityResult intensity(std::string_view country, int year) const;

    double default_intensity() const { return default_intensity_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, int>, double> entries_;
    double default_intensity_;
};

} // namespace hpcarbon
