#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hpcarbon::csv {

// Delimited text held as strings. Reading and writing are exact inverses,
// so write(read(f)) == f for any file this library emitted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct ReadOptions {
    char delimiter = ',';
    bool allow_comments = false; // skip lines whose first byte is '#'
    bool has_header = true;
};

// RFC-4180 style: quoted fields, "" escapes, embedded newlines in quotes.
// Ragged rows and unterminated quotes throw ParseError carrying the
// 1-based physical line number where the row started.
Table read(std::istream& in, const ReadOptions& opts = {});
Table read_file(const std::string& path, const ReadOptions& opts = {});

// Minimal quoting: a field is quoted only when it contains the delimiter,
// a quote, or a newline. Lines end with '\n'.
void write(std::ostream& out, const Table& table, char delimiter = ',');
std::string write_string(const Table& table, char delimiter = ',');

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// Strict parse of a full field; throws NormalizationError naming `field`.
double parse_double(std::string_view text, const std::string& field);
long long parse_int(std::string_view text, const std::string& field);

// "YYYY-MM-DD" with optional "T" or " " time part "HH:MM[:SS]" and
// optional trailing "Z". Returns seconds since the Unix epoch.
std::chrono::sys_seconds parse_iso8601(std::string_view text);

} // namespace hpcarbon::csv
