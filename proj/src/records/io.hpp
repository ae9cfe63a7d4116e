#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace recmax {

// Row-major observation matrix read from disk.
struct Dataset {
  int dim = 0;
  long long n = 0;
  std::vector<double> rows;
};

// Reads CSV (header "x1,...,xd", one observation per line) or
// newline-delimited JSON arrays; the format is sniffed from the first
// non-empty line.  Malformed rows report their 1-based line number.
Dataset read_rows(std::istream& in, const std::string& name);
Dataset read_rows_file(const std::string& path);

void write_rows_csv(std::ostream& out, std::span<const double> rows, long long n, int dim);

}  // namespace recmax
