#include "driftcurate/csv.hpp"

#include <charconv>
#include <cmath>

#include "driftcurate/error.hpp"
#include "driftcurate/fsio.hpp"

namespace fs = std::filesystem;

namespace driftcurate::io {

std::string format_double(double v) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::range_error, "cannot format a non-finite value");
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  const std::string bytes = read_binary_file(path);
  CsvTable table;
  size_t pos = 0;
  bool first = true;
  while (pos < bytes.size()) {
    size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) {
        fail(ErrorCode::malformed_header,
             "csv row has " + std::to_string(fields.size()) + " fields, header has " +
                 std::to_string(table.header.size()) + ": " + path.string());
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) {
    fail(ErrorCode::malformed_header, "csv has no header row: " + path.string());
  }
  return table;
}

void write_csv(const CsvTable& table, const fs::path& path) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i].find(',') != std::string::npos || row[i].find('\n') != std::string::npos) {
        fail(ErrorCode::invalid_argument, "csv field contains a separator: " + row[i]);
      }
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      fail(ErrorCode::invalid_argument, "csv row width does not match header");
    }
    append_row(row);
  }
  write_file_atomic(path, out);
}

}  // namespace driftcurate::io
