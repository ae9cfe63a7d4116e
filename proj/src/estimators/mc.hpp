#pragma once

#include <functional>
#include <span>
#include <string>

#include "dnorm/dependence_model.hpp"
#include "estimators/estimate.hpp"

namespace recmax {

// Mean of term(rng) over n_samples draws, chunked and order-reduced.
Estimate mc_mean(long long n_samples, std::uint64_t seed, int workers,
                 const std::string& method,
                 const std::function<double(Rng&)>& term);

// Ratio mean(num)/mean(den) on shared draws with a delta-method SE;
// `shift` is subtracted from mean(num) before dividing.
Estimate mc_ratio(long long n_samples, std::uint64_t seed, int workers,
                  const std::string& method,
                  const std::function<void(Rng&, double&, double&)>& term,
                  double shift = 0.0);

// Monte Carlo D-norm / dual values for models without closed forms.
Estimate norm_mc(const DependenceModel& model, std::span<const double> x,
                 long long n_samples, std::uint64_t seed, int workers);
Estimate dual_mc(const DependenceModel& model, std::span<const double> x,
                 long long n_samples, std::uint64_t seed, int workers);

}  // namespace recmax
