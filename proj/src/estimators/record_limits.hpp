#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dnorm/dependence_model.hpp"
#include "estimators/estimate.hpp"
#include "samplers/copula.hpp"

namespace recmax {

enum class LimitRoute {
  kAuto,               // eta draws, except the Weibull family (identity route)
  kEta,                // mean of ||eta||_D over max-stable draws
  kGeneratorIdentity,  // generator-draw identities, no eta sampling
};

// E ||eta||_D, the n * (simple record probability) limit.
Estimate simple_record_limit(const DependenceModel& model, long long n_samples,
                             std::uint64_t seed, int workers,
                             LimitRoute route = LimitRoute::kAuto);

// Exact finite-n record probabilities under a standard max-stable law:
// P(nth observation is a complete record) = E exp(-(n-1) ||eta||_D), and the
// cumulative sum over 1..n collapses to one geometric-sum term per draw.
Estimate record_prob_maxstable_exact(const DependenceModel& model, long long n,
                                     long long n_samples, std::uint64_t seed,
                                     int workers);
Estimate record_prob_cumsum(const DependenceModel& model, long long n,
                            long long n_samples, std::uint64_t seed, int workers);

struct GrowthRow {
  long long k = 0;
  double simple_mean = 0.0;
  double simple_se = 0.0;
  double complete_mean = 0.0;
  double complete_se = 0.0;
  // Counts divided by log k (NaN at k = 1).
  double simple_ratio = 0.0;
  double simple_ratio_se = 0.0;
  double complete_ratio = 0.0;
  double complete_ratio_se = 0.0;
};

std::vector<GrowthRow> expected_records_growth(const CopulaModel& copula, long long n,
                                               long long reps, std::uint64_t seed,
                                               int workers,
                                               std::span<const long long> checkpoints);

struct RoutedEstimate {
  Estimate primary;
  std::optional<Estimate> cross;
};

// Limit survival function of a complete record,
//   Hbar(x) = E min_i |max(eta_i, x_i)| / E min_i |eta_i|,  x <= 0,
// with a generator-draw cross route.  Rejects models with zero concurrence.
RoutedEstimate champion_survival(const DependenceModel& model, std::span<const double> x,
                                 long long n_samples, std::uint64_t seed, int workers);

// Limit df of a simple record,
//   H(x) = (E ||min(x, eta)||_D - ||x||_D) / E ||eta||_D,  x <= 0.
Estimate simple_record_limit_df(const DependenceModel& model, std::span<const double> x,
                                long long n_samples, std::uint64_t seed, int workers);

// Finite-n conditional estimates from copula streams of length n.  Records
// with index k in (n/2, n] are pooled, each contributing its indicator at
// the scaling k(U - 1); standard errors cluster by stream.
Estimate champion_survival_empirical(const CopulaModel& copula, std::span<const double> x,
                                     long long n, long long reps, std::uint64_t seed,
                                     int workers);
std::vector<Estimate> simple_record_limit_df_empirical(
    const CopulaModel& copula, const std::vector<std::vector<double>>& grid,
    long long n, long long reps, std::uint64_t seed, int workers);

// Closed forms used as oracles where the family admits one.
std::optional<double> champion_survival_closed_form(const DependenceModel& model,
                                                    std::span<const double> x);
std::optional<double> simple_record_limit_df_closed_form(const DependenceModel& model,
                                                         std::span<const double> x);

}  // namespace recmax
