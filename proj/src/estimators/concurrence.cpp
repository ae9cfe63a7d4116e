#include "estimators/concurrence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "estimators/mc.hpp"
#include "estimators/parallel.hpp"
#include "records/scan.hpp"
#include "samplers/eta_sampler.hpp"

namespace recmax {
namespace {

constexpr long long kInnerNormSamples = 256;

}  // namespace

Estimate concurrence_via_generator(const DependenceModel& model, long long n_samples,
                                   std::uint64_t seed, int workers) {
  const int d = model.dim();
  const bool nested = !model.has_closed_forms();
  const std::string method =
      nested ? "generator+inner=" + std::to_string(kInnerNormSamples) : "generator";
  Estimate e = mc_mean(n_samples, seed, workers, method, [&](Rng& rng) {
    thread_local std::vector<double> z, recip, zin;
    z.resize(static_cast<std::size_t>(d));
    recip.resize(static_cast<std::size_t>(d));
    model.sample_generator(rng, z);
    for (int i = 0; i < d; ++i) {
      if (!(z[static_cast<std::size_t>(i)] > 0.0)) return 0.0;
      recip[static_cast<std::size_t>(i)] = 1.0 / z[static_cast<std::size_t>(i)];
    }
    double nrm;
    if (nested) {
      zin.resize(static_cast<std::size_t>(d));
      double sum = 0.0;
      for (long long k = 0; k < kInnerNormSamples; ++k) {
        model.sample_generator(rng, zin);
        double mx = recip[0] * zin[0];
        for (int i = 1; i < d; ++i) {
          mx = std::max(mx, recip[static_cast<std::size_t>(i)] *
                                zin[static_cast<std::size_t>(i)]);
        }
        sum += mx;
      }
      nrm = sum / static_cast<double>(kInnerNormSamples);
    } else {
      nrm = model.norm(recip);
    }
    return nrm > 0.0 ? 1.0 / nrm : 0.0;
  });
  if (nested) {
    e.bias_note = "norm of 1/Z estimated by " + std::to_string(kInnerNormSamples) +
                  " nested generator draws per sample";
  }
  return e;
}

Estimate concurrence_via_eta(const DependenceModel& model, long long n_samples,
                             std::uint64_t seed, int workers) {
  const int d = model.dim();
  EtaSampler sampler(model);
  Estimate e =
      mc_mean(n_samples, seed, workers, "eta:" + sampler.method(), [&](Rng& rng) {
        thread_local std::vector<double> eta;
        eta.resize(static_cast<std::size_t>(d));
        sampler.sample(rng, eta);
        return model.dual(eta);
      });
  if (const auto bias = sampler.bias_bound()) {
    e.bias_note = "max-stable draws truncated; per-draw df bias below " +
                  std::to_string(*bias);
  }
  return e;
}

EmpiricalConcurrence concurrence_empirical(const CopulaModel& copula, long long n,
                                           long long reps, std::uint64_t seed,
                                           int workers) {
  if (n < 2) throw std::invalid_argument("concurrence_empirical: n must be >= 2");
  if (reps < 1) throw std::invalid_argument("concurrence_empirical: reps must be >= 1");
  const int d = copula.dim();
  struct Acc {
    MomentAcc champion;
    MomentAcc last_complete;
  };
  auto chunks = run_chunks<Acc>(
      reps, kChunks, seed, workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        Acc acc;
        std::vector<double> x(static_cast<std::size_t>(d));
        for (long long r = 0; r < count; ++r) {
          RecordScan scan(d, /*keep_times=*/false);
          RecordScan::Flags last{};
          for (long long i = 0; i < n; ++i) {
            copula.sample(rng, x);
            last = scan.push(x);
          }
          acc.champion.add(scan.champion().has_value() ? 1.0 : 0.0);
          acc.last_complete.add(last.complete ? 1.0 : 0.0);
        }
        return acc;
      });
  Acc total;
  for (const Acc& c : chunks) {
    total.champion.merge(c.champion);
    total.last_complete.merge(c.last_complete);
  }
  const std::string method = "empirical:n=" + std::to_string(n);
  EmpiricalConcurrence out;
  out.p_n.value = total.champion.mean;
  out.p_n.std_error = total.champion.std_error();
  out.p_n.n_samples = total.champion.n;
  out.p_n.method = method;
  out.p_n.seed = seed;
  out.n_pi_bar.value = static_cast<double>(n) * total.last_complete.mean;
  out.n_pi_bar.std_error = static_cast<double>(n) * total.last_complete.std_error();
  out.n_pi_bar.n_samples = total.last_complete.n;
  out.n_pi_bar.method = method + ":n*pi_bar";
  out.n_pi_bar.seed = seed;
  return out;
}

}  // namespace recmax
