#include "indecide/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "indecide/errors.hpp"

namespace indecide {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::string::npos;
}

std::size_t CsvTable::require_column(std::string_view name) const {
    const std::size_t i = column(name);
    if (i == std::string::npos) throw SchemaError("missing required column '" + std::string(name) + "'", 1);
    return i;
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto fields = split(view);
        if (!have_header) {
            for (const auto& f : fields)
                if (f.empty()) throw SchemaError("empty column name in header", line_no);
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw SchemaError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                  std::to_string(fields.size()),
                              line_no);
        table.rows.push_back(std::move(fields));
        table.lines.push_back(line_no);
    }
    if (!have_header) throw SchemaError("missing header row");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    return read_csv(in);
}

double parse_double(std::string_view field, std::size_t line) {
    const std::string_view f = trim(field);
    if (f == "inf" || f == "+inf" || f == "Infinity") return INFINITY;
    if (f == "-inf" || f == "-Infinity") return -INFINITY;
    if (f == "nan" || f == "NaN") return NAN;
    double v = 0.0;
    const char* begin = f.data();
    const char* end = f.data() + f.size();
    if (!f.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (f.empty() || ec != std::errc() || ptr != end)
        throw SchemaError("not a number: '" + std::string(field) + "'", line);
    return v;
}

long long parse_int(std::string_view field, std::size_t line) {
    const std::string_view f = trim(field);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
        throw SchemaError("not an integer: '" + std::string(field) + "'", line);
    return v;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

}  // namespace indecide
