#pragma once

#include "dnorm/dependence_model.hpp"
#include "estimators/estimate.hpp"
#include "samplers/copula.hpp"

namespace recmax {

// Limit probability that one observation dominates the sample, three routes:
// generator draws, max-stable draws, and finite-n champion frequencies.
Estimate concurrence_via_generator(const DependenceModel& model, long long n_samples,
                                   std::uint64_t seed, int workers);

Estimate concurrence_via_eta(const DependenceModel& model, long long n_samples,
                             std::uint64_t seed, int workers);

struct EmpiricalConcurrence {
  Estimate p_n;       // fraction of replications containing a champion
  Estimate n_pi_bar;  // n * P(last observation is a complete record)
};

EmpiricalConcurrence concurrence_empirical(const CopulaModel& copula, long long n,
                                           long long reps, std::uint64_t seed,
                                           int workers);

}  // namespace recmax
