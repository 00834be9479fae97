#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hpcarbon/edition.hpp"

namespace hpcarbon {

enum class PerfUnit { gflops, tflops, pflops };
enum class PowerUnit { w, kw, mw };

PerfUnit perf_unit_from_string(std::string_view s);
PowerUnit power_unit_from_string(std::string_view s);

double to_gflops(double value, PerfUnit unit);
double to_kw(double value, PowerUnit unit);

// Source units declared per edition file (exports changed units over the years).
struct UnitHints {
    PerfUnit rmax_unit = PerfUnit::gflops;
    PerfUnit rpeak_unit = PerfUnit::gflops;
    PowerUnit power_unit = PowerUnit::kw;
};

// ISO country code -> region tag. Lookups are keyed case-insensitively.
class RegionMap {
public:
    static RegionMap builtin_default();
    static RegionMap load(std::istream& in);
    static RegionMap load_file(const std::string& path);

    // Returns the tag, or "unknown" when the country is unmapped.
    std::string region_of(std::string_view country) const;
    // Total lookup used for aggregation: unmapped countries fall to "Other".
    std::string region_or_other(std::string_view country) const;

    bool empty() const { return entries_.empty(); }

private:
    std::map<std::string, std::string> entries_;
};

// identity-key -> canonical-key, one mapping per tab-separated line.
class AliasMap {
public:
    AliasMap() = default;
    static AliasMap load(std::istream& in);
    static AliasMap load_file(const std::string& path);

    std::string resolve(const std::string& key) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::string> entries_;
};

// --- raw export -> RawRow -------------------------------------------------

// One RawRow per data line; header names preserved verbatim.
std::vector<RawRow> parse_edition(std::istream& in, EditionDate date, char delimiter = ',');
std::vector<RawRow> parse_edition_file(const std::string& path, EditionDate date,
                                       char delimiter = ',');

// --- RawRow -> SystemRecord -----------------------------------------------

// The system-name column across export generations: name, system, computer.
std::optional<std::string_view> find_system_name(const RawRow& row);

// Converts magnitudes to GFLOP/s and kW, maps country to its ISO code and
// derives the region. Unknown countries tag the region "unknown".
SystemRecord normalize(const RawRow& row, const UnitHints& units, const RegionMap& regions);

// --- filtering -------------------------------------------------------------

struct FilterResult {
    std::vector<SystemRecord> kept;
    std::vector<std::pair<SystemRecord, RejectReason>> rejected;
};

// Partitions; order within `kept` preserved. All records must share one
// edition date.
FilterResult filter_edition(const std::vector<SystemRecord>& records,
                            const FilterPolicy& policy);

// --- identity resolution ----------------------------------------------------

std::string identity_key(const SystemRecord& record);

// Groups records sharing a normalized (name, site) key across editions.
// Relative rmax jumps above `upgrade_threshold` between consecutive
// apparitions are recorded as upgrade events but do not split the history.
// Output is sorted by identity key; deterministic regardless of record
// order within an edition.
std::vector<SystemHistory> resolve_identities(const std::vector<Edition>& editions,
                                              double upgrade_threshold = 0.10,
                                              const AliasMap& aliases = {});

// --- canonical edition files -------------------------------------------------

// Fixed column set, shortest round-trip number formatting. Re-parsing a
// canonical file yields bit-identical records.
void write_canonical_edition(std::ostream& out, const Edition& edition);
Edition read_canonical_edition(std::istream& in, EditionDate date);
Edition read_canonical_edition_file(const std::string& path, EditionDate date);

// "edition_YYYY_MM.csv"
std::string canonical_edition_filename(EditionDate date);
EditionDate date_from_canonical_filename(const std::string& filename);

} // namespace hpcarbon
