#include "estimators/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "estimators/parallel.hpp"

namespace recmax {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RECMAX_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Estimate mc_mean(long long n_samples, std::uint64_t seed, int workers,
                 const std::string& method,
                 const std::function<double(Rng&)>& term) {
  if (n_samples < 1) throw std::invalid_argument("mc: n_samples must be >= 1");
  auto chunks = run_chunks<MomentAcc>(
      n_samples, kChunks, seed, workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        MomentAcc acc;
        for (long long i = 0; i < count; ++i) acc.add(term(rng));
        return acc;
      });
  MomentAcc total;
  for (const MomentAcc& c : chunks) total.merge(c);
  Estimate e;
  e.value = total.mean;
  e.std_error = total.std_error();
  e.n_samples = total.n;
  e.method = method;
  e.seed = seed;
  return e;
}

Estimate mc_ratio(long long n_samples, std::uint64_t seed, int workers,
                  const std::string& method,
                  const std::function<void(Rng&, double&, double&)>& term,
                  double shift) {
  if (n_samples < 1) throw std::invalid_argument("mc: n_samples must be >= 1");
  auto chunks = run_chunks<PairAcc>(
      n_samples, kChunks, seed, workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        PairAcc acc;
        double num = 0.0, den = 0.0;
        for (long long i = 0; i < count; ++i) {
          term(rng, num, den);
          acc.add(num, den);
        }
        return acc;
      });
  PairAcc total;
  for (const PairAcc& c : chunks) total.merge(c);
  if (total.mean_y == 0.0) throw std::runtime_error("mc: ratio denominator is zero");
  Estimate e;
  const double n = static_cast<double>(total.n);
  const double a = total.mean_x - shift;
  const double b = total.mean_y;
  e.value = a / b;
  if (total.n > 1) {
    const double vx = total.m2_x / (n - 1.0);
    const double vy = total.m2_y / (n - 1.0);
    const double cv = total.cxy / (n - 1.0);
    const double var =
        (vx - 2.0 * e.value * cv + e.value * e.value * vy) / (b * b);
    e.std_error = std::sqrt(std::max(var, 0.0) / n);
  }
  e.n_samples = total.n;
  e.method = method;
  e.seed = seed;
  return e;
}

namespace {

Estimate generator_extreme_mc(const DependenceModel& model, std::span<const double> x,
                              long long n_samples, std::uint64_t seed, int workers,
                              bool use_max) {
  const int d = model.dim();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("mc: vector dimension mismatch");
  }
  std::vector<double> ax(x.begin(), x.end());
  for (double& v : ax) v = std::abs(v);
  // The term callback runs concurrently across chunks; scratch is per-thread.
  Estimate e = mc_mean(
      n_samples, seed, workers, use_max ? "mc:generator-max" : "mc:generator-min",
      [&](Rng& rng) {
        thread_local std::vector<double> z;
        z.resize(static_cast<std::size_t>(d));
        model.sample_generator(rng, z);
        double ext = ax[0] * z[0];
        for (int i = 1; i < d; ++i) {
          const double t = ax[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
          ext = use_max ? std::max(ext, t) : std::min(ext, t);
        }
        return ext;
      });
  return e;
}

}  // namespace

Estimate norm_mc(const DependenceModel& model, std::span<const double> x,
                 long long n_samples, std::uint64_t seed, int workers) {
  return generator_extreme_mc(model, x, n_samples, seed, workers, true);
}

Estimate dual_mc(const DependenceModel& model, std::span<const double> x,
                 long long n_samples, std::uint64_t seed, int workers) {
  return generator_extreme_mc(model, x, n_samples, seed, workers, false);
}

}  // namespace recmax
