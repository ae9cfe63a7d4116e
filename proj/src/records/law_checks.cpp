#include "records/law_checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/kahan.hpp"
#include "core/rng.hpp"

namespace recmax {
namespace {

constexpr long long kGapDrawGuard = 100000000;

bool escapes(std::span<const double> x, std::span<const double> m) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > m[i]) return true;
  }
  return false;
}

void absorb(std::span<const double> x, std::vector<double>& m) {
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = std::max(m[i], x[i]);
}

}  // namespace

GapLawReport conditional_gap_law_check(const CopulaModel& copula, int n_records,
                                       long long streams, std::uint64_t seed,
                                       double state_cutoff, int n_bins,
                                       int max_categories) {
  if (!copula.has_cdf()) {
    throw std::domain_error("gap law check: copula df unavailable");
  }
  if (n_records < 1 || streams < 1 || n_bins < 1 || max_categories < 2) {
    throw std::invalid_argument("gap law check: bad configuration");
  }
  const int d = copula.dim();
  GapLawReport rep;
  rep.streams = streams;
  rep.state_cutoff = state_cutoff;

  std::vector<std::pair<double, long long>> pool;  // (c, gap)
  pool.reserve(static_cast<std::size_t>(streams) * n_records);
  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<double> m(static_cast<std::size_t>(d));
  Rng rng(seed);
  for (long long s = 0; s < streams; ++s) {
    copula.sample(rng, x);
    m.assign(x.begin(), x.end());
    for (int rec = 0; rec < n_records; ++rec) {
      const double c = copula.cdf(m);
      if (!(c < state_cutoff)) {
        rep.skipped += n_records - rec;
        break;
      }
      long long gap = 0;
      do {
        if (++gap > kGapDrawGuard) {
          throw std::runtime_error("gap law check: gap draw guard exceeded");
        }
        copula.sample(rng, x);
      } while (!escapes(x, m));
      pool.emplace_back(c, gap);
      absorb(x, m);
    }
  }
  rep.gaps = static_cast<long long>(pool.size());
  if (pool.empty()) throw std::runtime_error("gap law check: no gaps measured");
  std::sort(pool.begin(), pool.end());

  const long long total = rep.gaps;
  rep.max_z = 0.0;
  rep.max_cat_z = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    const long long lo = total * b / n_bins;
    const long long hi = total * (b + 1) / n_bins;
    if (hi <= lo) continue;
    GapLawBin bin;
    bin.count = hi - lo;
    bin.c_lo = pool[static_cast<std::size_t>(lo)].first;
    bin.c_hi = pool[static_cast<std::size_t>(hi - 1)].first;
    KahanSum cs;
    for (long long i = lo; i < hi; ++i) cs.add(pool[static_cast<std::size_t>(i)].first);
    bin.c_mean = cs.value() / static_cast<double>(bin.count);

    // Categories 1..K plus a pooled tail >= K+1; expected counts decay in k,
    // so K shrinks until both category K and the tail expect >= 5.
    int cap = max_categories - 1;
    std::vector<double> expct(static_cast<std::size_t>(cap) + 1, 0.0);
    for (long long i = lo; i < hi; ++i) {
      const double c = pool[static_cast<std::size_t>(i)].first;
      double geom = 1.0 - c;  // P(gap = k), advanced by *c
      for (int k = 0; k < cap; ++k) {
        expct[static_cast<std::size_t>(k)] += geom;
        geom *= c;
      }
      expct[static_cast<std::size_t>(cap)] += geom / (1.0 - c);  // tail mass c^cap
    }
    int K = cap;
    while (K > 1 && (expct[static_cast<std::size_t>(K)] < 5.0 ||
                     expct[static_cast<std::size_t>(K - 1)] < 5.0)) {
      expct[static_cast<std::size_t>(K - 1)] += expct[static_cast<std::size_t>(K)];
      expct.pop_back();
      --K;
    }
    const int ncat = K + 1;  // categories 1..K and the tail
    std::vector<long long> obs(static_cast<std::size_t>(ncat), 0);
    for (long long i = lo; i < hi; ++i) {
      const long long gap = pool[static_cast<std::size_t>(i)].second;
      const long long at = std::min<long long>(gap - 1, ncat - 1);
      ++obs[static_cast<std::size_t>(at)];
    }
    double chisq = 0.0;
    double worst = 0.0;
    for (int k = 0; k < ncat; ++k) {
      const double e = expct[static_cast<std::size_t>(k)];
      const double o = static_cast<double>(obs[static_cast<std::size_t>(k)]);
      if (e <= 0.0) continue;
      const double r = o - e;
      chisq += r * r / e;
      const double p = e / static_cast<double>(bin.count);
      const double denom = std::sqrt(e * std::max(1.0 - p, 1e-12));
      worst = std::max(worst, std::abs(r) / denom);
    }
    bin.categories = ncat;
    bin.chisq = chisq;
    const int df = ncat - 1;
    bin.z = df > 0 ? (chisq - df) / std::sqrt(2.0 * df) : 0.0;
    bin.max_cat_z = worst;
    rep.max_z = std::max(rep.max_z, bin.z);
    rep.max_cat_z = std::max(rep.max_cat_z, worst);
    rep.bins.push_back(bin);
  }
  rep.pass = rep.max_z <= 4.0;
  return rep;
}

MonotonicityReport stochastic_monotonicity_check(const CopulaModel& copula, int max_n,
                                                 long long streams, std::uint64_t seed,
                                                 int t_max, long long gap_draw_cap) {
  if (max_n < 2 || streams < 2 || t_max < 1 || gap_draw_cap < 1) {
    throw std::invalid_argument("monotonicity check: bad configuration");
  }
  const int d = copula.dim();
  const int gaps_per_stream = max_n;  // G_1..G_max_n so pairs go up to (max_n-1, max_n)
  std::vector<long long> gap(static_cast<std::size_t>(streams) *
                                 static_cast<std::size_t>(gaps_per_stream),
                             -1);
  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<double> m(static_cast<std::size_t>(d));
  Rng rng(seed);
  MonotonicityReport rep;
  rep.max_n = max_n;
  rep.t_max = t_max;
  rep.streams = streams;
  for (long long s = 0; s < streams; ++s) {
    copula.sample(rng, x);
    m.assign(x.begin(), x.end());
    for (int g = 0; g < gaps_per_stream; ++g) {
      long long wait = 0;
      bool found = false;
      while (wait < gap_draw_cap) {
        ++wait;
        copula.sample(rng, x);
        if (escapes(x, m)) {
          found = true;
          break;
        }
      }
      if (!found) {
        // Remaining gaps stay unmeasured; indicator sums use complete pairs.
        ++rep.truncated_streams;
        break;
      }
      gap[static_cast<std::size_t>(s) * gaps_per_stream + g] = wait;
      absorb(x, m);
    }
  }

  rep.min_z = INFINITY;
  for (int g = 0; g + 1 < gaps_per_stream; ++g) {
    MonotonicityCell worst;
    worst.z = INFINITY;
    for (int t = 1; t <= t_max; ++t) {
      long long pairs = 0;
      long long sum_d = 0;
      long long sum_d2 = 0;
      long long n_le = 0;
      long long next_le = 0;
      for (long long s = 0; s < streams; ++s) {
        const long long g1 = gap[static_cast<std::size_t>(s) * gaps_per_stream + g];
        const long long g2 = gap[static_cast<std::size_t>(s) * gaps_per_stream + g + 1];
        if (g1 < 0 || g2 < 0) continue;
        ++pairs;
        const int a = g1 <= t ? 1 : 0;
        const int b = g2 <= t ? 1 : 0;
        n_le += a;
        next_le += b;
        sum_d += a - b;
        sum_d2 += (a - b) * (a - b);
      }
      if (pairs < 2) continue;
      const double mean = static_cast<double>(sum_d) / static_cast<double>(pairs);
      const double var =
          (static_cast<double>(sum_d2) - static_cast<double>(pairs) * mean * mean) /
          static_cast<double>(pairs - 1);
      const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(pairs));
      const double z = se > 0.0 ? mean / se : (mean >= 0.0 ? INFINITY : -INFINITY);
      if (z < worst.z) {
        worst.n = g + 1;
        worst.t = t;
        worst.p_n = static_cast<double>(n_le) / static_cast<double>(pairs);
        worst.p_next = static_cast<double>(next_le) / static_cast<double>(pairs);
        worst.diff = mean;
        worst.se = se;
        worst.z = z;
      }
    }
    if (std::isfinite(worst.z) || worst.n > 0) {
      rep.worst_per_n.push_back(worst);
      rep.min_z = std::min(rep.min_z, worst.z);
    }
  }
  rep.pass = rep.min_z >= -4.0;
  return rep;
}

}  // namespace recmax
