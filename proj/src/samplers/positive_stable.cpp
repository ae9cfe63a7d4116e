#include "samplers/positive_stable.hpp"

#include <cmath>
#include <stdexcept>

namespace recmax {

double sample_positive_stable(double alpha, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("sample_positive_stable: alpha must lie in (0,1)");
  }
  constexpr double kPi = 3.14159265358979323846;
  const double v = kPi * rng.uniform_open();
  const double w = rng.exponential();
  const double log_a = (alpha / (1.0 - alpha)) * std::log(std::sin(alpha * v)) +
                       std::log(std::sin((1.0 - alpha) * v)) -
                       (1.0 / (1.0 - alpha)) * std::log(std::sin(v));
  return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(w)));
}

}  // namespace recmax
