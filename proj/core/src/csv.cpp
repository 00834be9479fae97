#include "hpcarbon/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hpcarbon/errors.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon::csv {

namespace {

bool needs_quoting(std::string_view field, char delimiter) {
    return field.find(delimiter) != std::string_view::npos ||
           field.find('"') != std::string_view::npos ||
           field.find('\n') != std::string_view::npos ||
           field.find('\r') != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view field, char delimiter) {
    if (!needs_quoting(field, delimiter)) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

} // namespace

Table read(std::istream& in, const ReadOptions& opts) {
    Table table;
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());

    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t row_start_line = 1;
    bool at_line_start = true;
    std::size_t expected_width = 0;
    bool header_done = !opts.has_header;

    auto flush_row = [&]() {
        row.push_back(field);
        field.clear();
        // A physically empty line parses as one empty field; skip it.
        if (row.size() == 1 && row[0].empty() && !row_has_content) {
            row.clear();
            return;
        }
        if (!header_done) {
            table.header = std::move(row);
            expected_width = table.header.size();
            header_done = true;
        } else {
            if (expected_width == 0) expected_width = row.size();
            if (row.size() != expected_width)
                throw ParseError("ragged row: expected " + std::to_string(expected_width) +
                                     " fields, got " + std::to_string(row.size()),
                                 row_start_line);
            table.rows.push_back(std::move(row));
        }
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (at_line_start && opts.allow_comments && c == '#' && row.empty() && field.empty()) {
            while (i < content.size() && content[i] != '\n') ++i;
            ++line;
            row_start_line = line;
            continue;
        }
        at_line_start = false;
        if (c == '"' && field.empty()) {
            in_quotes = true;
            row_has_content = true;
        } else if (c == opts.delimiter) {
            row.push_back(field);
            field.clear();
            row_has_content = true;
        } else if (c == '\r') {
            // tolerate CRLF
        } else if (c == '\n') {
            flush_row();
            ++line;
            row_start_line = line;
            at_line_start = true;
        } else {
            field.push_back(c);
            row_has_content = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", row_start_line);
    if (!field.empty() || !row.empty() || row_has_content) flush_row();

    if (opts.has_header && table.header.empty())
        throw SchemaError("input has no header row");
    return table;
}

Table read_file(const std::string& path, const ReadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open file", path);
    return read(in, opts);
}

void write(std::ostream& out, const Table& table, char delimiter) {
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << delimiter;
            write_field(out, row[i], delimiter);
        }
        out << '\n';
    };
    if (!table.header.empty()) write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
}

std::string write_string(const Table& table, char delimiter) {
    std::ostringstream out;
    write(out, table, delimiter);
    return out.str();
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& field) {
    auto t = trim(text);
    double v{};
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw NormalizationError("cannot parse number '" + std::string(text) +
                                     "' in field '" + field + "'",
                                 field);
    return v;
}

long long parse_int(std::string_view text, const std::string& field) {
    auto t = trim(text);
    long long v{};
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw NormalizationError("cannot parse integer '" + std::string(text) +
                                     "' in field '" + field + "'",
                                 field);
    return v;
}

std::chrono::sys_seconds parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    auto t = trim(text);
    if (!t.empty() && (t.back() == 'Z' || t.back() == 'z')) t.remove_suffix(1);

    auto bad = [&]() -> ValidationError {
        return ValidationError("cannot parse timestamp '" + std::string(text) + "'");
    };

    auto take_int = [&](std::string_view s, std::size_t pos, std::size_t len) -> int {
        int v{};
        if (pos + len > s.size()) throw bad();
        auto res = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (res.ec != std::errc{} || res.ptr != s.data() + pos + len) throw bad();
        return v;
    };

    if (t.size() < 10 || t[4] != '-' || t[7] != '-') throw bad();
    int y = take_int(t, 0, 4), mo = take_int(t, 5, 2), d = take_int(t, 8, 2);
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                       day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw bad();
    sys_seconds ts = sys_days{ymd};

    if (t.size() > 10) {
        if (t[10] != 'T' && t[10] != ' ') throw bad();
        if (t.size() < 16 || t[13] != ':') throw bad();
        int h = take_int(t, 11, 2), mi = take_int(t, 14, 2), s = 0;
        if (t.size() > 16) {
            if (t[16] != ':' || t.size() != 19) throw bad();
            s = take_int(t, 17, 2);
        } else if (t.size() != 16) {
            throw bad();
        }
        if (h > 23 || mi > 59 || s > 59) throw bad();
        ts += hours{h} + minutes{mi} + seconds{s};
    }
    return ts;
}

} // namespace hpcarbon::csv
