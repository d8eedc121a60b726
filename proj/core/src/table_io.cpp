#include "uwdm/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwdm {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string format_db(double value_db) { return format_double(value_db); }

double parse_double(const std::string& text) {
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  if (text == "nan") return NAN;
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
}

void write_csv(const std::string& path, const Table& table,
               const std::vector<std::string>& comments) {
  for (const auto& row : table.rows)
    if (row.size() != table.columns.size())
      throw std::invalid_argument("write_csv: row width does not match header");

  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("write_csv: cannot open '" + tmp +
                               "' for writing");
    for (const auto& line : comments) out << "# " << line << '\n';
    for (size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ',';
      out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        out << row[c];
      }
      out << '\n';
    }
    if (!out)
      throw std::runtime_error("write_csv: write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");

  Table table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (table.columns.empty()) {
      table.columns = std::move(cells);
    } else {
      if (cells.size() != table.columns.size())
        throw std::runtime_error("read_csv: '" + path + "' line " +
                                 std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) +
                                 " fields, header has " +
                                 std::to_string(table.columns.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.columns.empty())
    throw std::runtime_error("read_csv: '" + path + "' is empty");
  return table;
}

}  // namespace uwdm
