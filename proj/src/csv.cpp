#include "kaclab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kaclab/errors.hpp"

namespace kaclab {

std::string format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(std::vector<CsvCell> row)
{
  if (row.size() != columns.size())
    throw DomainError("CsvTable: row has " + std::to_string(row.size()) + " cells, expected " +
                      std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s)
{
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

std::string render_cell(const CsvCell& cell)
{
  if (const auto* d = std::get_if<double>(&cell))
    return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell))
    return std::to_string(*i);
  return quote(std::get<std::string>(cell));
}

}  // namespace

std::string render_csv(const CsvTable& table, const std::vector<std::string>& comments)
{
  std::ostringstream out;
  for (const auto& c : comments)
    out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << quote(table.columns[i]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << render_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

void emit_csv(const CsvTable& table, const std::string& path, const std::vector<std::string>& comments)
{
  const std::string text = render_csv(table, comments);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout)
      throw IoError("cannot write to standard output");
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.close();
  if (!file)
    throw IoError("failed writing '" + path + "'");
}

}  // namespace kaclab
