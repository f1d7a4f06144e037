#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace kaclab {

/// Shortest-safe text for a double: 17 significant digits, so the value
/// parses back exactly.
std::string format_double(double x);

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable
{
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  /// Throws DomainError if the row width differs from the column count.
  void add_row(std::vector<CsvCell> row);
};

/// Renders `# line` for each comment, the header row, then the rows in
/// order. Strings containing a comma, quote or newline are quoted.
std::string render_csv(const CsvTable& table, const std::vector<std::string>& comments = {});

/// Writes render_csv to `path` ("-" for standard output). Throws IoError
/// naming the path when the file cannot be written.
void emit_csv(const CsvTable& table, const std::string& path, const std::vector<std::string>& comments = {});

}  // namespace kaclab
