#pragma once

#include <cstdint>
#include <vector>

#include "samplers/copula.hpp"

namespace recmax {

// The wait after a record whose running componentwise maximum is m is
// Geom(1 - C(m)) with support {1,2,...}.  The check pools gaps into
// equal-count bins by c = C(m) and chi-square tests the observed gap
// categories against the exact mixture sum_i c_i^{k-1}(1 - c_i).
struct GapLawBin {
  long long count = 0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  double c_mean = 0.0;
  int categories = 0;
  double chisq = 0.0;
  double z = 0.0;          // (chisq - df) / sqrt(2 df)
  double max_cat_z = 0.0;  // worst per-category |z|
};

struct GapLawReport {
  long long streams = 0;
  long long gaps = 0;
  long long skipped = 0;  // states beyond the cutoff, decided before the gap
  double state_cutoff = 0.0;
  std::vector<GapLawBin> bins;
  double max_z = 0.0;
  double max_cat_z = 0.0;
  bool pass = false;
};

GapLawReport conditional_gap_law_check(const CopulaModel& copula, int n_records,
                                       long long streams, std::uint64_t seed,
                                       double state_cutoff = 0.9995, int n_bins = 20,
                                       int max_categories = 30);

// Successive record gaps are stochastically increasing; the check compares
// paired df indicators 1{G_n <= t} - 1{G_{n+1} <= t} at every integer t.
struct MonotonicityCell {
  int n = 0;
  int t = 0;
  double p_n = 0.0;
  double p_next = 0.0;
  double diff = 0.0;
  double se = 0.0;
  double z = 0.0;
};

struct MonotonicityReport {
  int max_n = 0;
  int t_max = 0;
  long long streams = 0;
  long long truncated_streams = 0;  // hit the per-gap draw cap; remainder dropped
  std::vector<MonotonicityCell> worst_per_n;  // the minimal-z cell for each n
  double min_z = 0.0;
  bool pass = false;
};

MonotonicityReport stochastic_monotonicity_check(const CopulaModel& copula, int max_n,
                                                 long long streams, std::uint64_t seed,
                                                 int t_max = 50,
                                                 long long gap_draw_cap = 1000000);

}  // namespace recmax
