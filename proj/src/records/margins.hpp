#pragma once

#include <span>
#include <string>
#include <vector>

namespace recmax {

// Univariate marginal df used by the probability-integral transform.
//
// Spec strings, one per coordinate (or a single spec broadcast to all):
//   rank            empirical midranks, u = (rank - 0.5)/n
//   normal[:mu:sigma]
//   exp[:rate]      (alias: exponential)
//   uniform[:a:b]
//   frechet:alpha   df exp(-x^-alpha) on x > 0
//   gumbel[:mu:beta]
struct MarginSpec {
  enum class Kind { kRank, kNormal, kExponential, kUniform, kFrechet, kGumbel };

  Kind kind = Kind::kRank;
  double a = 0.0;
  double b = 1.0;

  static MarginSpec parse(const std::string& text);

  bool is_rank() const { return kind == Kind::kRank; }
  double cdf(double x) const;
};

std::vector<MarginSpec> parse_margins(const std::string& text, int dim);

// Componentwise PIT of row-major data; rank margins use midranks so tied
// values transform identically.
std::vector<double> pit_transform(std::span<const double> rows, long long n,
                                  int dim, const std::vector<MarginSpec>& margins);

}  // namespace recmax
