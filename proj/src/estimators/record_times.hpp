#pragma once

#include <optional>
#include <span>
#include <vector>

#include "estimators/estimate.hpp"
#include "samplers/copula.hpp"

namespace recmax {

struct TailRow {
  long long k = 0;
  double survival = 0.0;  // P(N(2) > k)
  double se = 0.0;
  long long count = 0;
};

// E N(2) has two routes: the df integral E(1/(1 - C(U))) + 1 aggregated by
// median-of-means (the integrand has infinite variance whenever the tail is
// not trivially light), and the simulated waiting time with a truncation
// cap.  The tail table feeds a log-log slope fit; slopes >= -1.3 flag a
// diverging expectation (slope -1 is the infinite-mean boundary, -2 the
// independent-coordinates rate).
struct ExpectedN2 {
  std::optional<Estimate> integral_route;
  Estimate direct_route;
  std::vector<TailRow> tail;
  double tail_slope = 0.0;  // NaN when the tail dies before the fit window
  bool divergence_flag = false;
};

ExpectedN2 expected_N2(const CopulaModel& copula, long long n_samples,
                       std::uint64_t seed, int workers, long long cap = 100000);

// Tail-comparison dependence measure at finite thresholds:
//   chi_bar(u) = 2 log(1-u) / log P(X_1 > u, X_2 > u) - 1
// on the first two coordinates.
struct ChiBarRow {
  double u = 0.0;
  double chi_bar = 0.0;
  double se = 0.0;
  long long exceedances = 0;
  bool low_count = false;  // fewer than 50 joint exceedances
};

std::vector<ChiBarRow> chi_bar(const CopulaModel& copula, std::span<const double> u_grid,
                               long long n_samples, std::uint64_t seed, int workers);
std::vector<ChiBarRow> chi_bar_from_rows(std::span<const double> rows, long long n,
                                         int dim, std::span<const double> u_grid);

// P(X_{N(2)} <= x): outer Monte Carlo over the first observation y of
// P(X <= x, X not<= y) / (1 - C(y)), cross-checked by direct simulation of
// the second record.
struct SecondRecordDf {
  std::optional<Estimate> formula_route;
  Estimate direct_route;
};

SecondRecordDf second_record_df(const CopulaModel& copula, std::span<const double> x,
                                long long n_samples, std::uint64_t seed, int workers);

}  // namespace recmax
