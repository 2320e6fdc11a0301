#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace driftcurate::io {

// Shortest round-trip decimal form, '.' decimal point, locale-independent.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // column index by header name, -1 if absent
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Fields must not contain commas or newlines; values here never do.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

}  // namespace driftcurate::io
