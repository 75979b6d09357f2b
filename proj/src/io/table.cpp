#include "blowup/io/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "blowup/error.hpp"

namespace blowup::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
std::string format_impl(T v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_impl(std::string_view s) {
    s = trim(s);
    if (s == "nan") return std::numeric_limits<T>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<T>::infinity();
    if (s == "-inf") return -std::numeric_limits<T>::infinity();
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::FileFormat, "malformed number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    const char strict = line.find('\t') != std::string_view::npos ? '\t'
                        : line.find(',') != std::string_view::npos  ? ','
                                                                     : '\0';
    if (strict != '\0') {
        std::size_t i = 0;
        while (true) {
            const std::size_t j = line.find(strict, i);
            out.emplace_back(trim(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i)));
            if (j == std::string_view::npos) break;
            i = j + 1;
        }
        return out;
    }
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

std::string format_real(double v) { return format_impl(v, std::numeric_limits<double>::max_digits10); }
std::string format_real(long double v) { return format_impl(v, std::numeric_limits<long double>::max_digits10); }

double parse_double(std::string_view s) { return parse_impl<double>(s); }
long double parse_long_double(std::string_view s) { return parse_impl<long double>(s); }

const std::string& Table::require(const std::string& key) const {
    const auto it = meta.find(key);
    if (it == meta.end()) throw Error(ErrorCode::FileFormat, "missing header key '" + key + "'");
    return it->second;
}

double Table::require_double(const std::string& key) const { return parse_double(require(key)); }
long double Table::require_long_double(const std::string& key) const { return parse_long_double(require(key)); }

long long Table::require_int(const std::string& key) const {
    const std::string& s = require(key);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::FileFormat, "header key '" + key + "' is not an integer");
    return v;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw Error(ErrorCode::FileFormat, "missing column '" + std::string(name) + "'");
}

void write_table(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta,
                 const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows) {
    for (const auto& [k, v] : meta) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "\t" : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "\t" : "") << row[i];
        os << '\n';
    }
}

Table read_table(std::istream& is) {
    Table t;
    std::string line;
    bool have_columns = false;
    while (std::getline(is, line)) {
        const std::string_view s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            const std::string_view body = trim(s.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            t.meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
            continue;
        }
        std::string_view raw = line;
        while (!raw.empty() && (raw.back() == '\r' || raw.back() == '\n')) raw.remove_suffix(1);
        auto fields = split_fields(raw);
        if (!have_columns) {
            t.columns = std::move(fields);
            have_columns = true;
            continue;
        }
        if (fields.size() != t.columns.size())
            throw Error(ErrorCode::FileFormat, "row has " + std::to_string(fields.size()) + " fields, expected " +
                                                   std::to_string(t.columns.size()));
        t.rows.push_back(std::move(fields));
    }
    if (!have_columns) throw Error(ErrorCode::FileFormat, "table has no column header");
    return t;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileFormat, "cannot open '" + path + "'");
    return read_table(in);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileFormat, "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error(ErrorCode::FileFormat, "write failed for '" + path + "'");
}

}  // namespace blowup::io
