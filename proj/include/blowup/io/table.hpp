#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace blowup::io {

/// Shortest-safe text forms: 17 significant digits for binary64 and 21 for the
/// x87 extended type, so values survive a text round-trip bit for bit.
std::string format_real(double v);
std::string format_real(long double v);

/// Throws FileFormat on malformed numbers (locale independent).
double parse_double(std::string_view s);
long double parse_long_double(std::string_view s);

/// Delimited text table with `# key = value` header lines.
///
/// Blank lines and comment lines without `=` are ignored; the first
/// non-comment line is the column header, remaining lines are rows.
/// Lines containing a tab (or else a comma) split on every delimiter, so empty
/// cells survive; other lines split on runs of spaces.
struct Table {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Throws FileFormat if the key is missing or not a number.
    const std::string& require(const std::string& key) const;
    double require_double(const std::string& key) const;
    long double require_long_double(const std::string& key) const;
    long long require_int(const std::string& key) const;
    /// Index of a column; throws FileFormat if absent.
    std::size_t column(std::string_view name) const;
};

/// meta entries are written in the given order.
void write_table(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta,
                 const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows);

Table read_table(std::istream& is);
Table read_table_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace blowup::io
