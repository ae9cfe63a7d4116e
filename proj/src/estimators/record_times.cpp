#include "estimators/record_times.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "core/kahan.hpp"
#include "estimators/mc.hpp"
#include "estimators/parallel.hpp"

namespace recmax {
namespace {

constexpr long long kInnerSamples = 512;
constexpr long long kDirectWaitCap = 1000000;

bool escapes(std::span<const double> x, std::span<const double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > y[i]) return true;
  }
  return false;
}

// Tail grid: every integer up to 100, then eighth-of-a-decade steps.
std::vector<long long> tail_grid(long long cap) {
  std::vector<long long> ks;
  for (long long k = 1; k <= std::min<long long>(100, cap - 1); ++k) ks.push_back(k);
  for (int j = 17; ; ++j) {
    const long long k = std::llround(std::pow(10.0, j / 8.0));
    if (k >= cap) break;
    if (k > ks.back()) ks.push_back(k);
  }
  return ks;
}

double median_in_place(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

}  // namespace

ExpectedN2 expected_N2(const CopulaModel& copula, long long n_samples,
                       std::uint64_t seed, int workers, long long cap) {
  if (n_samples < kMomBlocks) {
    throw std::invalid_argument("expected_N2: n_samples too small");
  }
  if (cap < 1000) throw std::invalid_argument("expected_N2: cap must be >= 1000");
  const int d = copula.dim();
  const bool with_cdf = copula.has_cdf();
  ExpectedN2 out;

  if (with_cdf) {
    // Median of 32 block means of 1/(1 - C(U)); SE from the scaled median
    // absolute deviation of the block means.
    auto blocks = run_chunks<double>(
        n_samples, kMomBlocks, mix_seed(seed, 0x6d6f6d), workers,
        [&](int, std::uint64_t chunk_seed, long long count) {
          Rng rng(chunk_seed);
          std::vector<double> u(static_cast<std::size_t>(d));
          KahanSum sum;
          for (long long i = 0; i < count; ++i) {
            copula.sample(rng, u);
            const double c = std::min(copula.cdf(u), 1.0 - 1e-15);
            sum.add(1.0 / (1.0 - c));
          }
          return sum.value() / static_cast<double>(count);
        });
    std::vector<double> b = blocks;
    const double med = median_in_place(b);
    for (double& v : b) v = std::abs(v - med);
    const double mad = median_in_place(b);
    Estimate e;
    e.value = med + 1.0;
    e.std_error = 1.2533 * 1.4826 * mad / std::sqrt(static_cast<double>(kMomBlocks));
    e.n_samples = n_samples;
    e.method = "integral:median-of-means(" + std::to_string(kMomBlocks) + ")";
    e.seed = seed;
    out.integral_route = std::move(e);
  }

  // Direct route.  With a closed-form df the waiting time after X_1 = y is
  // drawn by geometric inversion; otherwise the stream is simulated.
  const std::vector<long long> ks = tail_grid(cap);
  struct Acc {
    MomentAcc mean;
    std::vector<long long> above;
  };
  auto chunks = run_chunks<Acc>(
      n_samples, kChunks, mix_seed(seed, 0x646972), workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        Acc acc;
        acc.above.assign(ks.size(), 0);
        std::vector<double> y(static_cast<std::size_t>(d));
        std::vector<double> x(static_cast<std::size_t>(d));
        for (long long i = 0; i < count; ++i) {
          copula.sample(rng, y);
          long long n2;
          if (with_cdf) {
            const double c = copula.cdf(y);
            if (c <= 0.0) {
              n2 = 2;
            } else {
              const double w = std::ceil(std::log(rng.uniform_open()) / std::log(c));
              n2 = w >= static_cast<double>(cap) ? cap
                                                 : 1 + std::max<long long>(1, static_cast<long long>(w));
            }
          } else {
            long long wait = 0;
            do {
              ++wait;
              copula.sample(rng, x);
            } while (!escapes(x, y) && wait < cap);
            n2 = 1 + wait;
          }
          n2 = std::min(n2, cap);
          acc.mean.add(static_cast<double>(n2));
          for (std::size_t j = 0; j < ks.size() && ks[j] < n2; ++j) ++acc.above[j];
        }
        return acc;
      });
  Acc total;
  total.above.assign(ks.size(), 0);
  for (const Acc& c : chunks) {
    total.mean.merge(c.mean);
    for (std::size_t j = 0; j < ks.size(); ++j) total.above[j] += c.above[j];
  }
  out.direct_route.value = total.mean.mean;
  out.direct_route.std_error = total.mean.std_error();
  out.direct_route.n_samples = n_samples;
  out.direct_route.method = "direct:cap=" + std::to_string(cap);
  out.direct_route.seed = seed;
  out.direct_route.bias_note = "mean truncated at N(2) = " + std::to_string(cap);

  const double n = static_cast<double>(n_samples);
  out.tail.resize(ks.size());
  for (std::size_t j = 0; j < ks.size(); ++j) {
    TailRow& row = out.tail[j];
    row.k = ks[j];
    row.count = total.above[j];
    row.survival = static_cast<double>(total.above[j]) / n;
    row.se = std::sqrt(std::max(row.survival * (1.0 - row.survival), 0.0) / n);
  }

  // Weighted log-log fit over the asymptotic window k in [100, cap/10].
  KahanSum sw, swx, swy;
  for (const TailRow& row : out.tail) {
    if (row.k < 100 || row.k > cap / 10 || row.count < 30) continue;
    const double w = static_cast<double>(row.count);
    sw.add(w);
    swx.add(w * std::log(static_cast<double>(row.k)));
    swy.add(w * std::log(row.survival));
  }
  if (sw.value() > 0.0) {
    const double xbar = swx.value() / sw.value();
    const double ybar = swy.value() / sw.value();
    KahanSum sxx, sxy;
    int pts = 0;
    for (const TailRow& row : out.tail) {
      if (row.k < 100 || row.k > cap / 10 || row.count < 30) continue;
      const double w = static_cast<double>(row.count);
      const double dx = std::log(static_cast<double>(row.k)) - xbar;
      sxx.add(w * dx * dx);
      sxy.add(w * dx * (std::log(row.survival) - ybar));
      ++pts;
    }
    out.tail_slope = pts >= 3 && sxx.value() > 0.0 ? sxy.value() / sxx.value() : NAN;
  } else {
    out.tail_slope = NAN;
  }
  out.divergence_flag = std::isfinite(out.tail_slope) && out.tail_slope >= -1.3;
  out.direct_route.divergence_flag = out.divergence_flag;
  if (out.integral_route) out.integral_route->divergence_flag = out.divergence_flag;
  return out;
}

namespace {

std::vector<ChiBarRow> chi_bar_rows_from_counts(std::span<const double> u_grid,
                                                std::span<const long long> counts,
                                                long long n) {
  std::vector<ChiBarRow> rows(u_grid.size());
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    ChiBarRow& row = rows[j];
    row.u = u_grid[j];
    row.exceedances = counts[j];
    row.low_count = counts[j] < 50;
    if (counts[j] == 0) {
      row.chi_bar = NAN;
      row.se = NAN;
      continue;
    }
    const double p = static_cast<double>(counts[j]) / static_cast<double>(n);
    const double lp = std::log(p);
    row.chi_bar = 2.0 * std::log1p(-row.u) / lp - 1.0;
    const double se_logp =
        std::sqrt(std::max(1.0 - p, 0.0) / (static_cast<double>(n) * p));
    row.se = std::abs(2.0 * std::log1p(-row.u) / (lp * lp)) * se_logp;
  }
  return rows;
}

void check_u_grid(std::span<const double> u_grid) {
  if (u_grid.empty()) throw std::invalid_argument("chi_bar: empty u grid");
  for (double u : u_grid) {
    if (!(u > 0.0 && u < 1.0)) {
      throw std::invalid_argument("chi_bar: u grid must lie in (0,1)");
    }
  }
}

}  // namespace

std::vector<ChiBarRow> chi_bar(const CopulaModel& copula, std::span<const double> u_grid,
                               long long n_samples, std::uint64_t seed, int workers) {
  if (copula.dim() < 2) throw std::invalid_argument("chi_bar: needs d >= 2");
  check_u_grid(u_grid);
  if (n_samples < 2) throw std::invalid_argument("chi_bar: n_samples too small");
  const int d = copula.dim();
  auto chunks = run_chunks<std::vector<long long>>(
      n_samples, kChunks, seed, workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        std::vector<long long> hits(u_grid.size(), 0);
        std::vector<double> x(static_cast<std::size_t>(d));
        for (long long i = 0; i < count; ++i) {
          copula.sample(rng, x);
          const double lo = std::min(x[0], x[1]);
          for (std::size_t j = 0; j < u_grid.size(); ++j) {
            if (lo > u_grid[j]) ++hits[j];
          }
        }
        return hits;
      });
  std::vector<long long> counts(u_grid.size(), 0);
  for (const auto& c : chunks) {
    for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += c[j];
  }
  return chi_bar_rows_from_counts(u_grid, counts, n_samples);
}

std::vector<ChiBarRow> chi_bar_from_rows(std::span<const double> rows, long long n,
                                         int dim, std::span<const double> u_grid) {
  if (dim < 2) throw std::invalid_argument("chi_bar: needs d >= 2");
  check_u_grid(u_grid);
  if (n < 1 || rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("chi_bar: row buffer does not match n*dim");
  }
  std::vector<long long> counts(u_grid.size(), 0);
  for (long long i = 0; i < n; ++i) {
    const double lo = std::min(rows[static_cast<std::size_t>(i) * dim],
                               rows[static_cast<std::size_t>(i) * dim + 1]);
    for (std::size_t j = 0; j < u_grid.size(); ++j) {
      if (lo > u_grid[j]) ++counts[j];
    }
  }
  return chi_bar_rows_from_counts(u_grid, counts, n);
}

SecondRecordDf second_record_df(const CopulaModel& copula, std::span<const double> x,
                                long long n_samples, std::uint64_t seed, int workers) {
  const int d = copula.dim();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("second record df: vector dimension mismatch");
  }
  std::vector<double> xv(x.begin(), x.end());
  SecondRecordDf out;

  if (copula.has_cdf()) {
    const double cx = copula.cdf(xv);
    out.formula_route = mc_mean(
        n_samples, mix_seed(seed, 0x666f726d), workers, "formula:outer-mc",
        [&](Rng& rng) {
          thread_local std::vector<double> y, mn;
          y.resize(static_cast<std::size_t>(d));
          mn.resize(static_cast<std::size_t>(d));
          copula.sample(rng, y);
          for (int i = 0; i < d; ++i) {
            mn[static_cast<std::size_t>(i)] =
                std::min(xv[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
          }
          const double den = std::max(1.0 - copula.cdf(y), 1e-15);
          const double num = std::clamp(cx - copula.cdf(mn), 0.0, den);
          return num / den;
        });
    out.formula_route->seed = seed;
  } else {
    out.formula_route = mc_mean(
        n_samples, mix_seed(seed, 0x666f726d), workers,
        "formula:outer-mc+inner=" + std::to_string(kInnerSamples),
        [&](Rng& rng) {
          thread_local std::vector<double> y, z;
          y.resize(static_cast<std::size_t>(d));
          z.resize(static_cast<std::size_t>(d));
          copula.sample(rng, y);
          long long hit = 0, esc = 0;
          for (long long k = 0; k < kInnerSamples; ++k) {
            copula.sample(rng, z);
            if (!escapes(z, y)) continue;
            ++esc;
            bool below = true;
            for (int i = 0; i < d; ++i) {
              if (z[static_cast<std::size_t>(i)] > xv[static_cast<std::size_t>(i)]) {
                below = false;
                break;
              }
            }
            if (below) ++hit;
          }
          return esc > 0 ? static_cast<double>(hit) / static_cast<double>(esc) : 0.0;
        });
    out.formula_route->seed = seed;
    out.formula_route->bias_note =
        "conditional probability from " + std::to_string(kInnerSamples) +
        " nested draws per outer sample";
  }

  struct Acc {
    MomentAcc mean;
    long long dropped = 0;
  };
  auto chunks = run_chunks<Acc>(
      n_samples, kChunks, mix_seed(seed, 0x64697265), workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        Acc acc;
        std::vector<double> y(static_cast<std::size_t>(d));
        std::vector<double> z(static_cast<std::size_t>(d));
        for (long long i = 0; i < count; ++i) {
          copula.sample(rng, y);
          long long wait = 0;
          bool found = false;
          while (wait < kDirectWaitCap) {
            ++wait;
            copula.sample(rng, z);
            if (escapes(z, y)) {
              found = true;
              break;
            }
          }
          if (!found) {
            ++acc.dropped;
            continue;
          }
          bool below = true;
          for (int j = 0; j < d; ++j) {
            if (z[static_cast<std::size_t>(j)] > xv[static_cast<std::size_t>(j)]) {
              below = false;
              break;
            }
          }
          acc.mean.add(below ? 1.0 : 0.0);
        }
        return acc;
      });
  Acc total;
  for (const Acc& c : chunks) {
    total.mean.merge(c.mean);
    total.dropped += c.dropped;
  }
  if (total.mean.n == 0) throw std::runtime_error("second record df: all waits capped");
  out.direct_route.value = total.mean.mean;
  out.direct_route.std_error = total.mean.std_error();
  out.direct_route.n_samples = total.mean.n;
  out.direct_route.method = "direct:cap=" + std::to_string(kDirectWaitCap);
  out.direct_route.seed = seed;
  if (total.dropped > 0) {
    out.direct_route.bias_note =
        std::to_string(total.dropped) + " replications hit the waiting cap";
  }
  return out;
}

}  // namespace recmax
