#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gacl::io {

// File/parse failures carry the offending path (and line where known).
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);

// Writes to <path>.tmp then renames, so readers never observe a partial
// file. Parent directories are created as needed.
void write_file_atomic(const std::string& path, const std::string& content);

// Minimal comma-separated table (no quoting; none of the workbench's files
// need it). Rows must match the header width.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const;  // throws IngestError
  double num(std::size_t row, std::size_t col) const;
};

Table read_csv(const std::string& path);

double parse_double(const std::string& cell, const std::string& where);

// Fixed 9-significant-digit rendering used for every emitted CSV value so
// that re-runs are byte-identical.
std::string format_g9(double v);

}  // namespace gacl::io
