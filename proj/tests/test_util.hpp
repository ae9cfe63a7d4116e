#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// sqrt(n) * sup |F_n - F|; 2.2765 is the Kolmogorov quantile matching a
// two-sided 4-sigma normal tail.
inline constexpr double kKs4Sigma = 2.2765;

inline double ks_scaled(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return std::sqrt(n) * d;
}

inline bool within(double value, double target, double se, double k = 4.0, double slack = 0.0) {
  return std::abs(value - target) <= k * se + slack;
}

}  // namespace testutil
