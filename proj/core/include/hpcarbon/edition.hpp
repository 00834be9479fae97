#pragma once

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpcarbon/errors.hpp"

namespace hpcarbon {

// Lists are published twice a year, in June and November.
struct EditionDate {
    int year = 0;
    int month = 0; // 6 or 11

    EditionDate() = default;
    EditionDate(int y, int m) : year(y), month(m) {
        if (m != 6 && m != 11)
            throw ArgumentError("edition month must be 6 (June) or 11 (November), got " +
                                std::to_string(m));
        if (y < 1900 || y > 2100)
            throw ArgumentError("implausible edition year " + std::to_string(y));
    }

    auto operator<=>(const EditionDate&) const = default;

    double decimal_year() const { return year + (month - 1) / 12.0; }

    std::string to_string() const {
        return std::to_string(year) + (month < 10 ? "-0" : "-") + std::to_string(month);
    }

    static EditionDate parse(std::string_view text);
};

// One list row exactly as exported: every source column kept verbatim.
struct RawRow {
    EditionDate edition_date;
    std::vector<std::pair<std::string, std::string>> columns;

    // Case/whitespace-insensitive column lookup by canonical name.
    std::optional<std::string_view> find(std::string_view name) const;
};

enum class Accelerator { none, gpu, other };

std::string to_string(Accelerator a);
Accelerator accelerator_from_string(std::string_view s);

// One machine in one list edition, in canonical units (GFLOP/s, kW).
struct SystemRecord {
    EditionDate edition_date;
    int rank = 0;
    std::string name;
    std::string site;
    std::string country; // ISO alpha-2 where recognized, raw text otherwise
    std::string region;  // derived from country; "unknown" when unmapped
    double rmax_gflops = 0;
    double rpeak_gflops = 0;
    std::optional<double> power_kw;
    std::optional<long long> total_cores;
    std::optional<Accelerator> accelerator;

    bool operator==(const SystemRecord&) const = default;
};

// All records of one list edition.
struct Edition {
    EditionDate date;
    std::vector<SystemRecord> records;
};

struct FilterPolicy {
    bool require_power = false;
    bool reject_rmax_over_rpeak = true;
    double max_plausible_efficiency = 100.0; // GFLOPS/W ceiling

    void validate() const {
        if (!(max_plausible_efficiency > 0))
            throw ArgumentError("max_plausible_efficiency must be > 0");
    }
};

enum class RejectReason { missing_power, rmax_exceeds_rpeak, implausible_efficiency };

std::string to_string(RejectReason r);

// One physical machine tracked across editions.
struct SystemHistory {
    struct Entry {
        EditionDate date;
        int rank = 0;
        double rmax_gflops = 0;
    };

    std::string identity_key; // normalized "name|site"
    std::string country;
    std::vector<Entry> editions; // strictly increasing in date
    EditionDate first_apparition;
    int best_rank = 0;
    std::vector<EditionDate> upgrade_events;

    // Each biannual edition contributes half a year.
    double presence_years() const { return 0.5 * static_cast<double>(editions.size()); }
};

} // namespace hpcarbon
