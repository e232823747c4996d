#pragma once

// Output helpers: CSV with '#'-prefixed comment lines, number formatting,
// atomic writes and width-correction files.

#include <map>
#include <string>
#include <vector>

namespace cubres::io {

/// Shortest of %.15g .. %.17g that reads back to the same double;
/// "nan" and "inf" spelled out.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> comments;  // written as "# <text>"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
  static CsvTable parse(const std::string& text);
};

/// Write to `path` via a temporary file in the same directory and rename.
void write_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Parse a width-correction file: one "N delta" or "N,delta" pair per line.
std::map<int, double> parse_delta(const std::string& text);

/// UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace cubres::io
