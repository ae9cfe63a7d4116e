#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "core/rng.hpp"
#include "dnorm/dependence_model.hpp"

namespace recmax {

// Draws of the standard max-stable vector eta with joint df
// P(eta <= x) = exp(-||x||_D) on x <= 0, all margins exp(x).
//
// Method per family:
//  - comonotone / independence: direct exponential transforms;
//  - logistic: exact positive-stable mixture of Frechet coordinates;
//  - bounded generators (bernoulli, marshall-olkin, custom with a declared
//    bound): exact Poisson point process with envelope thinning;
//  - weibull: thinning with the generator clamped at its (1 - 1e-6)
//    quantile; the induced df bias is below d * 1e-6 per draw and every
//    estimate fed by this sampler carries a bias note.
class EtaSampler {
 public:
  explicit EtaSampler(DependenceModel model);

  // Fills out (size d) with one draw; returns the number of point-process
  // arrivals consumed (0 for the exact non-thinning paths).
  std::size_t sample(Rng& rng, std::span<double> out) const;

  const DependenceModel& model() const { return model_; }
  const std::string& method() const { return method_; }

  // Per-draw bound on the df bias when the generator had to be truncated.
  std::optional<double> bias_bound() const { return bias_bound_; }

  static constexpr std::size_t kMaxPoints = 10'000'000;

 private:
  enum class Mode { kComonotone, kIndependence, kLogistic, kThinning };

  std::size_t sample_thinned(Rng& rng, std::span<double> out) const;

  DependenceModel model_;
  DependenceModel thinning_model_;  // possibly clamped variant of model_
  Mode mode_;
  double bound_ = 0.0;
  std::string method_;
  std::optional<double> bias_bound_;
};

}  // namespace recmax
