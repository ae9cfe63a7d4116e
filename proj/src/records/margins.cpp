#include "records/margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "core/special.hpp"

namespace recmax {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(const std::string& tok, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("margin: bad ") + what + " '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("margin: bad ") + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace

MarginSpec MarginSpec::parse(const std::string& text) {
  const std::vector<std::string> tok = split(text, ':');
  const std::string& name = tok[0];
  const std::size_t nparam = tok.size() - 1;
  MarginSpec m;
  auto param = [&](std::size_t i, double fallback) {
    return i < nparam ? parse_number(tok[i + 1], "parameter") : fallback;
  };
  if (name == "rank" || name == "ranks") {
    m.kind = Kind::kRank;
    if (nparam != 0) throw std::invalid_argument("margin: rank takes no parameters");
  } else if (name == "normal") {
    m.kind = Kind::kNormal;
    m.a = param(0, 0.0);
    m.b = param(1, 1.0);
    if (nparam > 2) throw std::invalid_argument("margin: normal takes mu,sigma");
    if (!(m.b > 0.0)) throw std::invalid_argument("margin: normal sigma must be > 0");
  } else if (name == "exp" || name == "exponential") {
    m.kind = Kind::kExponential;
    m.a = param(0, 1.0);
    if (nparam > 1) throw std::invalid_argument("margin: exp takes rate");
    if (!(m.a > 0.0)) throw std::invalid_argument("margin: exp rate must be > 0");
  } else if (name == "uniform") {
    m.kind = Kind::kUniform;
    m.a = param(0, 0.0);
    m.b = param(1, 1.0);
    if (nparam > 2) throw std::invalid_argument("margin: uniform takes a,b");
    if (!(m.b > m.a)) throw std::invalid_argument("margin: uniform needs b > a");
  } else if (name == "frechet") {
    m.kind = Kind::kFrechet;
    if (nparam != 1) throw std::invalid_argument("margin: frechet takes alpha");
    m.a = param(0, 1.0);
    if (!(m.a > 0.0)) throw std::invalid_argument("margin: frechet alpha must be > 0");
  } else if (name == "gumbel") {
    m.kind = Kind::kGumbel;
    m.a = param(0, 0.0);
    m.b = param(1, 1.0);
    if (nparam > 2) throw std::invalid_argument("margin: gumbel takes mu,beta");
    if (!(m.b > 0.0)) throw std::invalid_argument("margin: gumbel beta must be > 0");
  } else {
    throw std::invalid_argument("margin: unknown spec '" + text + "'");
  }
  return m;
}

double MarginSpec::cdf(double x) const {
  switch (kind) {
    case Kind::kRank:
      throw std::logic_error("margin: rank has no parametric df");
    case Kind::kNormal:
      return norm_cdf((x - a) / b);
    case Kind::kExponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-a * x);
    case Kind::kUniform:
      return std::clamp((x - a) / (b - a), 0.0, 1.0);
    case Kind::kFrechet:
      return x <= 0.0 ? 0.0 : std::exp(-std::pow(x, -a));
    case Kind::kGumbel:
      return std::exp(-std::exp(-(x - a) / b));
  }
  return 0.0;
}

std::vector<MarginSpec> parse_margins(const std::string& text, int dim) {
  if (dim <= 0) throw std::invalid_argument("margins: dimension must be positive");
  std::vector<MarginSpec> out;
  for (const std::string& part : split(text, ',')) out.push_back(MarginSpec::parse(part));
  if (out.size() == 1) out.resize(static_cast<std::size_t>(dim), out[0]);
  if (out.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("margins: expected 1 or " + std::to_string(dim) +
                                " specs, got " + std::to_string(out.size()));
  }
  return out;
}

std::vector<double> pit_transform(std::span<const double> rows, long long n,
                                  int dim, const std::vector<MarginSpec>& margins) {
  if (dim <= 0 || n < 0) throw std::invalid_argument("pit: bad shape");
  if (rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("pit: row buffer does not match n*dim");
  }
  if (margins.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("pit: one margin spec per coordinate required");
  }
  std::vector<double> out(rows.size());
  std::vector<long long> order;
  for (int j = 0; j < dim; ++j) {
    const MarginSpec& m = margins[static_cast<std::size_t>(j)];
    if (!m.is_rank()) {
      for (long long i = 0; i < n; ++i) {
        const std::size_t at = static_cast<std::size_t>(i) * dim + j;
        out[at] = m.cdf(rows[at]);
      }
      continue;
    }
    // Midranks: tied values share the average of the ranks they occupy.
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0ll);
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
      return rows[static_cast<std::size_t>(a) * dim + j] <
             rows[static_cast<std::size_t>(b) * dim + j];
    });
    long long i = 0;
    while (i < n) {
      long long k = i;
      const double v = rows[static_cast<std::size_t>(order[i]) * dim + j];
      while (k + 1 < n && rows[static_cast<std::size_t>(order[k + 1]) * dim + j] == v) ++k;
      const double midrank = 0.5 * static_cast<double>(i + k) + 1.0;
      const double u = (midrank - 0.5) / static_cast<double>(n);
      for (long long t = i; t <= k; ++t) {
        out[static_cast<std::size_t>(order[t]) * dim + j] = u;
      }
      i = k + 1;
    }
  }
  return out;
}

}  // namespace recmax
