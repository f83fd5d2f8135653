#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace indecide {

/// Comma-separated table with a mandatory header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row, for error messages.
    std::vector<std::size_t> lines;

    /// Index of `name` in the header, or npos.
    std::size_t column(std::string_view name) const;
    std::size_t require_column(std::string_view name) const;
};

/// Reads a header-first CSV. Blank lines and lines starting with '#' are skipped;
/// every row must have as many fields as the header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Strict numeric parse of a CSV field; accepts inf/nan spellings. Throws SchemaError.
double parse_double(std::string_view field, std::size_t line = 0);
long long parse_int(std::string_view field, std::size_t line = 0);

/// 17 significant digits, so a value survives a write/read round trip unchanged.
std::string format_double(double v);

/// Writes `fields` comma-joined followed by LF.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace indecide
