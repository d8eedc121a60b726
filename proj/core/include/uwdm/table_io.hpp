#pragma once

#include <string>
#include <vector>

namespace uwdm {

// Minimal column-table container for the CSV artifacts. All cells are kept
// as strings so numeric formatting stays under the writer's control.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Fixed, locale-independent formatting used by every artifact writer, so
// identical inputs produce identical files.
std::string format_double(double value);
std::string format_db(double value_db);  // "inf" for unbounded quantities

double parse_double(const std::string& text);  // accepts "inf"

// Writes through a temporary file and renames into place. Comment lines,
// when given, are emitted before the header with a leading "# "; artifact
// writers use them to embed the resolved run configuration.
void write_csv(const std::string& path, const Table& table,
               const std::vector<std::string>& comments = {});

// Reads the table back; full-line '#' comments and blank lines are skipped.
Table read_csv(const std::string& path);

}  // namespace uwdm
