#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace recmax {

// Monte Carlo result.  std_error is sample sd / sqrt(n_samples) except for
// the median-of-means route, which documents its aggregation in `method`.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long long n_samples = 0;
  std::string method;
  std::uint64_t seed = 0;
  std::optional<std::string> bias_note;
  std::optional<bool> divergence_flag;
};

}  // namespace recmax
