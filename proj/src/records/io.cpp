#include "records/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace recmax {
namespace {

[[noreturn]] void fail(const std::string& name, long long line, const std::string& what) {
  throw std::runtime_error(name + ": line " + std::to_string(line) + ": " + what);
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}

double parse_cell(const std::string& tok, const std::string& name, long long line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(name, line, "malformed number '" + tok + "'");
  }
  while (used < tok.size() && (tok[used] == ' ' || tok[used] == '\t')) ++used;
  if (used != tok.size() || !std::isfinite(v)) {
    fail(name, line, "malformed number '" + tok + "'");
  }
  return v;
}

Dataset read_csv(std::istream& in, const std::string& name, std::string header,
                 long long header_line) {
  Dataset ds;
  strip_cr(header);
  // Header pins dimension and column order: exactly x1,...,xd.
  {
    std::size_t start = 0;
    int col = 0;
    while (true) {
      const std::size_t pos = header.find(',', start);
      std::string tok = header.substr(start, pos == std::string::npos ? pos : pos - start);
      const std::size_t a = tok.find_first_not_of(" \t");
      const std::size_t b = tok.find_last_not_of(" \t");
      tok = a == std::string::npos ? "" : tok.substr(a, b - a + 1);
      ++col;
      if (tok != "x" + std::to_string(col)) {
        fail(name, header_line, "expected header column 'x" + std::to_string(col) +
                                    "', got '" + tok + "'");
      }
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    ds.dim = col;
  }

  std::string line;
  long long lineno = header_line;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (blank(line)) continue;
    int col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      const std::string tok =
          line.substr(start, pos == std::string::npos ? pos : pos - start);
      ++col;
      if (col > ds.dim) fail(name, lineno, "expected " + std::to_string(ds.dim) + " columns");
      ds.rows.push_back(parse_cell(tok, name, lineno));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (col != ds.dim) fail(name, lineno, "expected " + std::to_string(ds.dim) + " columns");
    ++ds.n;
  }
  return ds;
}

Dataset read_ndjson(std::istream& in, const std::string& name, std::string first,
                    long long first_line) {
  Dataset ds;
  std::string line = std::move(first);
  long long lineno = first_line;
  while (true) {
    strip_cr(line);
    if (!blank(line)) {
      nlohmann::json row;
      try {
        row = nlohmann::json::parse(line);
      } catch (const std::exception& e) {
        fail(name, lineno, e.what());
      }
      if (!row.is_array() || row.empty()) fail(name, lineno, "expected a JSON array");
      if (ds.dim == 0) ds.dim = static_cast<int>(row.size());
      if (static_cast<int>(row.size()) != ds.dim) {
        fail(name, lineno, "expected " + std::to_string(ds.dim) + " values");
      }
      for (const auto& cell : row) {
        if (!cell.is_number()) fail(name, lineno, "expected numeric entries");
        const double v = cell.get<double>();
        if (!std::isfinite(v)) fail(name, lineno, "non-finite entry");
        ds.rows.push_back(v);
      }
      ++ds.n;
    }
    ++lineno;
    if (!std::getline(in, line)) break;
  }
  return ds;
}

}  // namespace

Dataset read_rows(std::istream& in, const std::string& name) {
  std::string line;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string probe = line;
    strip_cr(probe);
    if (blank(probe)) continue;
    const std::size_t at = probe.find_first_not_of(" \t");
    if (probe[at] == '[') return read_ndjson(in, name, line, lineno);
    return read_csv(in, name, line, lineno);
  }
  throw std::runtime_error(name + ": empty input");
}

Dataset read_rows_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_rows(in, path);
}

void write_rows_csv(std::ostream& out, std::span<const double> rows, long long n, int dim) {
  if (dim <= 0 || n < 0 ||
      rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("write_rows_csv: bad shape");
  }
  for (int j = 0; j < dim; ++j) {
    out << (j ? ",x" : "x") << j + 1;
  }
  out << '\n';
  char buf[64];
  for (long long i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", rows[static_cast<std::size_t>(i) * dim + j]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace recmax
