#include "hpcarbon/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon {

namespace {

// Header lookup ignores case, whitespace, and unit suffixes:
// "Rmax [TFlop/s]" -> "rmax", "Total Cores" -> "total_cores",
// "Accelerator/Co-Processor" -> "accelerator".
std::string header_canon(std::string_view header) {
    auto cut = header.find_first_of("([/");
    if (cut != std::string_view::npos) header = header.substr(0, cut);
    std::string key = normalize_key(header);
    std::replace(key.begin(), key.end(), ' ', '_');
    return key;
}

const std::map<std::string, std::string>& country_iso_table() {
    static const std::map<std::string, std::string> table = {
        {"united states", "US"}, {"united states of america", "US"}, {"usa", "US"},
        {"china", "CN"}, {"japan", "JP"}, {"germany", "DE"}, {"france", "FR"},
        {"united kingdom", "GB"}, {"uk", "GB"}, {"italy", "IT"}, {"canada", "CA"},
        {"south korea", "KR"}, {"korea, south", "KR"}, {"republic of korea", "KR"},
        {"netherlands", "NL"}, {"switzerland", "CH"}, {"sweden", "SE"},
        {"norway", "NO"}, {"finland", "FI"}, {"denmark", "DK"}, {"poland", "PL"},
        {"ireland", "IE"}, {"belgium", "BE"}, {"austria", "AT"},
        {"czech republic", "CZ"}, {"czechia", "CZ"}, {"luxembourg", "LU"},
        {"portugal", "PT"}, {"spain", "ES"}, {"russia", "RU"}, {"india", "IN"},
        {"brazil", "BR"}, {"australia", "AU"}, {"taiwan", "TW"},
        {"hong kong", "HK"}, {"singapore", "SG"}, {"saudi arabia", "SA"},
        {"united arab emirates", "AE"}, {"israel", "IL"}, {"mexico", "MX"},
        {"south africa", "ZA"}, {"new zealand", "NZ"}, {"thailand", "TH"},
        {"malaysia", "MY"}, {"indonesia", "ID"}, {"vietnam", "VN"},
        {"slovakia", "SK"}, {"slovenia", "SI"}, {"hungary", "HU"},
        {"greece", "GR"}, {"turkey", "TR"}, {"ukraine", "UA"},
        {"bulgaria", "BG"}, {"romania", "RO"}, {"croatia", "HR"},
        {"estonia", "EE"}, {"latvia", "LV"}, {"lithuania", "LT"},
        {"iceland", "IS"}, {"argentina", "AR"}, {"chile", "CL"},
        {"colombia", "CO"}, {"egypt", "EG"}, {"morocco", "MA"}, {"qatar", "QA"},
        {"kuwait", "KW"}, {"bahrain", "BH"}, {"pakistan", "PK"},
        {"philippines", "PH"}, {"kazakhstan", "KZ"}, {"belarus", "BY"},
        {"serbia", "RS"}, {"cyprus", "CY"}, {"malta", "MT"},
    };
    return table;
}

// Returns the ISO code when the value is a known country name or already
// looks like an ISO alpha-2 code; otherwise the trimmed raw text.
std::string to_iso_country(std::string_view raw) {
    auto t = trim(raw);
    if (t.empty()) return {};
    const auto& table = country_iso_table();
    auto it = table.find(normalize_key(t));
    if (it != table.end()) return it->second;
    if (t.size() == 2 && std::isalpha(static_cast<unsigned char>(t[0])) &&
        std::isalpha(static_cast<unsigned char>(t[1])))
        return to_upper(t);
    return std::string(t);
}

} // namespace

EditionDate EditionDate::parse(std::string_view text) {
    auto t = trim(text);
    auto dash = t.find('-');
    if (dash == std::string_view::npos)
        throw ArgumentError("edition date must be YYYY-MM, got '" + std::string(text) + "'");
    int y = static_cast<int>(csv::parse_int(t.substr(0, dash), "edition year"));
    int m = static_cast<int>(csv::parse_int(t.substr(dash + 1), "edition month"));
    return EditionDate(y, m);
}

std::optional<std::string_view> RawRow::find(std::string_view name) const {
    for (const auto& [header, value] : columns)
        if (header_canon(header) == name) return std::string_view(value);
    return std::nullopt;
}

std::string to_string(Accelerator a) {
    switch (a) {
        case Accelerator::none: return "none";
        case Accelerator::gpu: return "gpu";
        case Accelerator::other: return "other";
    }
    return "other";
}

Accelerator accelerator_from_string(std::string_view s) {
    std::string v = to_lower(trim(s));
    if (v.empty() || v == "none" || v == "n/a" || v == "-" || v == "0")
        return Accelerator::none;
    for (const char* tok : {"gpu", "nvidia", "tesla", "volta", "ampere", "hopper",
                            "instinct", "v100", "a100", "h100", "mi250", "mi300"})
        if (v.find(tok) != std::string::npos) return Accelerator::gpu;
    return Accelerator::other;
}

std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::missing_power: return "missing_power";
        case RejectReason::rmax_exceeds_rpeak: return "rmax_exceeds_rpeak";
        case RejectReason::implausible_efficiency: return "implausible_efficiency";
    }
    return "unknown";
}

PerfUnit perf_unit_from_string(std::string_view s) {
    std::string v = to_lower(trim(s));
    v.erase(std::remove(v.begin(), v.end(), '/'), v.end());
    if (v == "gflops" || v == "gflop") return PerfUnit::gflops;
    if (v == "tflops" || v == "tflop") return PerfUnit::tflops;
    if (v == "pflops" || v == "pflop") return PerfUnit::pflops;
    throw ArgumentError("unknown performance unit '" + std::string(s) + "'");
}

PowerUnit power_unit_from_string(std::string_view s) {
    std::string v = to_lower(trim(s));
    if (v == "w") return PowerUnit::w;
    if (v == "kw") return PowerUnit::kw;
    if (v == "mw") return PowerUnit::mw;
    throw ArgumentError("unknown power unit '" + std::string(s) + "'");
}

double to_gflops(double value, PerfUnit unit) {
    switch (unit) {
        case PerfUnit::gflops: return value;
        case PerfUnit::tflops: return value * 1e3;
        case PerfUnit::pflops: return value * 1e6;
    }
    return value;
}

double to_kw(double value, PowerUnit unit) {
    switch (unit) {
        case PowerUnit::w: return value * 1e-3;
        case PowerUnit::kw: return value;
        case PowerUnit::mw: return value * 1e3;
    }
    return value;
}

// --- RegionMap ---------------------------------------------------------------

RegionMap RegionMap::builtin_default() {
    RegionMap m;
    auto add = [&m](std::initializer_list<const char*> codes, const char* region) {
        for (const char* c : codes) m.entries_[c] = region;
    };
    add({"US", "CA", "BR", "MX", "AR", "CL", "CO"}, "Americas");
    add({"DE", "FR", "GB", "IT", "ES", "NL", "CH", "SE", "NO", "FI", "DK", "PL",
         "IE", "BE", "AT", "CZ", "LU", "PT", "RU", "SK", "SI", "HU", "GR", "BG",
         "RO", "HR", "EE", "LV", "LT", "IS", "UA", "RS", "CY", "MT"},
        "Europe");
    add({"JP", "CN", "KR", "TW", "HK"}, "East Asia");
    return m;
}

RegionMap RegionMap::load(std::istream& in) {
    RegionMap m;
    csv::ReadOptions opts;
    opts.allow_comments = true;
    csv::Table table = csv::read(in, opts);
    if (table.header.size() < 2)
        throw SchemaError("region map needs columns country,region");
    for (const auto& row : table.rows)
        m.entries_[to_upper(trim(row[0]))] = std::string(trim(row[1]));
    return m;
}

RegionMap RegionMap::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open region map", path);
    return load(in);
}

std::string RegionMap::region_of(std::string_view country) const {
    auto it = entries_.find(to_upper(trim(country)));
    return it == entries_.end() ? std::string("unknown") : it->second;
}

std::string RegionMap::region_or_other(std::string_view country) const {
    auto it = entries_.find(to_upper(trim(country)));
    return it == entries_.end() ? std::string("Other") : it->second;
}

// --- AliasMap ----------------------------------------------------------------

AliasMap AliasMap::load(std::istream& in) {
    AliasMap m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto tab = t.find('\t');
        if (tab == std::string_view::npos)
            throw ParseError("alias line needs '<from>\\t<to>'", lineno);
        m.entries_[normalize_key(t.substr(0, tab))] = normalize_key(t.substr(tab + 1));
    }
    return m;
}

AliasMap AliasMap::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open alias map", path);
    return load(in);
}

std::string AliasMap::resolve(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? key : it->second;
}

// --- parsing -----------------------------------------------------------------

std::vector<RawRow> parse_edition(std::istream& in, EditionDate date, char delimiter) {
    csv::ReadOptions opts;
    opts.delimiter = delimiter;
    csv::Table table = csv::read(in, opts);

    bool has_rank = false, has_rmax = false;
    for (const auto& h : table.header) {
        auto c = header_canon(h);
        has_rank |= (c == "rank");
        has_rmax |= (c == "rmax");
    }
    if (!has_rank || !has_rmax)
        throw SchemaError(std::string("edition export is missing mandatory header: ") +
                          (!has_rank ? "rank" : "rmax"));

    std::vector<RawRow> rows;
    rows.reserve(table.rows.size());
    for (auto& row : table.rows) {
        RawRow raw;
        raw.edition_date = date;
        raw.columns.reserve(table.header.size());
        for (std::size_t i = 0; i < table.header.size(); ++i)
            raw.columns.emplace_back(table.header[i], std::move(row[i]));
        rows.push_back(std::move(raw));
    }
    return rows;
}

std::vector<RawRow> parse_edition_file(const std::string& path, EditionDate date,
                                       char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open edition export", path);
    return parse_edition(in, date, delimiter);
}

// --- normalization ------------------------------------------------------------

std::optional<std::string_view> find_system_name(const RawRow& row) {
    // exports have called this column Name, System, or Computer over the years
    for (const char* header : {"name", "system", "computer"})
        if (auto v = row.find(header); v && !trim(*v).empty()) return v;
    return std::nullopt;
}

SystemRecord normalize(const RawRow& row, const UnitHints& units, const RegionMap& regions) {
    SystemRecord rec;
    rec.edition_date = row.edition_date;

    auto require = [&row](const std::string& name) -> std::string_view {
        auto v = row.find(name);
        if (!v || trim(*v).empty())
            throw NormalizationError("missing field '" + name + "'", name);
        return *v;
    };

    rec.rank = static_cast<int>(csv::parse_int(require("rank"), "rank"));
    if (rec.rank < 1 || rec.rank > 500)
        throw NormalizationError("rank " + std::to_string(rec.rank) + " outside [1, 500]",
                                 "rank");

    auto name = find_system_name(row);
    if (!name) throw NormalizationError("missing field 'name'", "name");
    rec.name = std::string(trim(*name));

    if (auto site = row.find("site")) rec.site = std::string(trim(*site));

    if (auto country = row.find("country")) {
        rec.country = to_iso_country(*country);
        rec.region = regions.region_of(rec.country);
    } else {
        rec.region = "unknown";
    }

    rec.rmax_gflops = to_gflops(csv::parse_double(require("rmax"), "rmax"), units.rmax_unit);
    if (!(rec.rmax_gflops > 0))
        throw NormalizationError("rmax must be positive", "rmax");

    rec.rpeak_gflops =
        to_gflops(csv::parse_double(require("rpeak"), "rpeak"), units.rpeak_unit);
    if (!(rec.rpeak_gflops > 0))
        throw NormalizationError("rpeak must be positive", "rpeak");

    if (auto power = row.find("power"); power && !trim(*power).empty()) {
        double kw = to_kw(csv::parse_double(*power, "power"), units.power_unit);
        // zero means "not measured" in old exports
        if (kw > 0) rec.power_kw = kw;
    }

    auto cores = row.find("total_cores");
    if (!cores) cores = row.find("cores");
    if (cores && !trim(*cores).empty()) {
        long long n = csv::parse_int(*cores, "total_cores");
        if (n > 0) rec.total_cores = n;
    }

    if (auto acc = row.find("accelerator"))
        rec.accelerator = accelerator_from_string(*acc);

    return rec;
}

// --- filtering ------------------------------------------------------------------

FilterResult filter_edition(const std::vector<SystemRecord>& records,
                            const FilterPolicy& policy) {
    policy.validate();
    for (const auto& rec : records)
        if (rec.edition_date != records.front().edition_date)
            throw ContractViolation("filter_edition: records span multiple edition dates");

    FilterResult out;
    out.kept.reserve(records.size());
    for (const auto& rec : records) {
        if (policy.reject_rmax_over_rpeak && rec.rmax_gflops > rec.rpeak_gflops) {
            out.rejected.emplace_back(rec, RejectReason::rmax_exceeds_rpeak);
            continue;
        }
        if (policy.require_power && !rec.power_kw) {
            out.rejected.emplace_back(rec, RejectReason::missing_power);
            continue;
        }
        if (rec.power_kw) {
            double eff = rec.rmax_gflops / (*rec.power_kw * 1000.0);
            if (eff > policy.max_plausible_efficiency) {
                out.rejected.emplace_back(rec, RejectReason::implausible_efficiency);
                continue;
            }
        }
        out.kept.push_back(rec);
    }
    return out;
}

// --- identity resolution -----------------------------------------------------------

std::string identity_key(const SystemRecord& record) {
    return normalize_key(record.name) + "|" + normalize_key(record.site);
}

std::vector<SystemHistory> resolve_identities(const std::vector<Edition>& editions,
                                              double upgrade_threshold,
                                              const AliasMap& aliases) {
    if (upgrade_threshold < 0)
        throw ArgumentError("upgrade_threshold must be non-negative");
    for (std::size_t i = 1; i < editions.size(); ++i)
        if (!(editions[i - 1].date < editions[i].date))
            throw ContractViolation("resolve_identities: editions not strictly ascending");

    std::map<std::string, SystemHistory> by_key;
    for (const auto& edition : editions) {
        // Duplicate keys inside one edition count as a single apparition;
        // the best-ranked record represents it.
        std::map<std::string, const SystemRecord*> in_edition;
        for (const auto& rec : edition.records) {
            std::string key = aliases.resolve(identity_key(rec));
            auto [it, inserted] = in_edition.try_emplace(std::move(key), &rec);
            if (!inserted && rec.rank < it->second->rank) it->second = &rec;
        }

        for (const auto& [key, rec] : in_edition) {
            SystemHistory& h = by_key[key];
            if (h.editions.empty()) {
                h.identity_key = key;
                h.country = rec->country;
                h.first_apparition = rec->edition_date;
                h.best_rank = rec->rank;
            } else {
                const auto& prev = h.editions.back();
                if (std::abs(rec->rmax_gflops / prev.rmax_gflops - 1.0) > upgrade_threshold)
                    h.upgrade_events.push_back(rec->edition_date);
                h.best_rank = std::min(h.best_rank, rec->rank);
            }
            h.editions.push_back({rec->edition_date, rec->rank, rec->rmax_gflops});
        }
    }

    std::vector<SystemHistory> out;
    out.reserve(by_key.size());
    for (auto& [key, history] : by_key) out.push_back(std::move(history));
    return out;
}

// --- canonical edition files ----------------------------------------------------------

namespace {
const std::vector<std::string> kCanonicalHeader = {
    "rank",     "name",     "site",        "country", "region",
    "rmax_gflops", "rpeak_gflops", "power_kw", "total_cores", "accelerator"};
}

void write_canonical_edition(std::ostream& out, const Edition& edition) {
    csv::Table table;
    table.header = kCanonicalHeader;
    table.rows.reserve(edition.records.size());
    for (const auto& r : edition.records) {
        table.rows.push_back({
            std::to_string(r.rank),
            r.name,
            r.site,
            r.country,
            r.region,
            csv::format_double(r.rmax_gflops),
            csv::format_double(r.rpeak_gflops),
            r.power_kw ? csv::format_double(*r.power_kw) : std::string(),
            r.total_cores ? std::to_string(*r.total_cores) : std::string(),
            r.accelerator ? to_string(*r.accelerator) : std::string(),
        });
    }
    csv::write(out, table);
}

Edition read_canonical_edition(std::istream& in, EditionDate date) {
    csv::Table table = csv::read(in);
    if (table.header != kCanonicalHeader)
        throw SchemaError("not a canonical edition file (unexpected header)");

    Edition edition;
    edition.date = date;
    edition.records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        SystemRecord r;
        r.edition_date = date;
        r.rank = static_cast<int>(csv::parse_int(row[0], "rank"));
        r.name = row[1];
        r.site = row[2];
        r.country = row[3];
        r.region = row[4];
        r.rmax_gflops = csv::parse_double(row[5], "rmax_gflops");
        r.rpeak_gflops = csv::parse_double(row[6], "rpeak_gflops");
        if (!row[7].empty()) r.power_kw = csv::parse_double(row[7], "power_kw");
        if (!row[8].empty()) r.total_cores = csv::parse_int(row[8], "total_cores");
        if (!row[9].empty()) {
            if (row[9] == "none") r.accelerator = Accelerator::none;
            else if (row[9] == "gpu") r.accelerator = Accelerator::gpu;
            else r.accelerator = Accelerator::other;
        }
        edition.records.push_back(std::move(r));
    }
    return edition;
}

Edition read_canonical_edition_file(const std::string& path, EditionDate date) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open canonical edition", path);
    return read_canonical_edition(in, date);
}

std::string canonical_edition_filename(EditionDate date) {
    return "edition_" + std::to_string(date.year) + (date.month < 10 ? "_0" : "_") +
           std::to_string(date.month) + ".csv";
}

EditionDate date_from_canonical_filename(const std::string& filename) {
    // edition_YYYY_MM.csv
    if (filename.size() != 19 || !starts_with(filename, "edition_"))
        throw ArgumentError("not a canonical edition filename: " + filename);
    int y = static_cast<int>(csv::parse_int(filename.substr(8, 4), "year"));
    int m = static_cast<int>(csv::parse_int(filename.substr(13, 2), "month"));
    return EditionDate(y, m);
}

} // namespace hpcarbon
