#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace apure::csv {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses a double, accepting the whole field only. Throws std::invalid_argument.
double parse_double(std::string_view text);

/// Splits one RFC-4180 record (quoted fields, doubled quotes) into fields.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field if it contains a comma, quote or line break.
std::string escape_field(std::string_view field);

/// A parsed table: header plus data rows. Lines starting with '#' are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line number of each data row, for error messages.
  std::vector<std::size_t> line_numbers;

  /// Index of a header column, or npos.
  std::size_t column(std::string_view name) const;
};

Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace apure::csv
