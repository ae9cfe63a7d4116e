#include "estimators/record_limits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "core/kahan.hpp"
#include "estimators/mc.hpp"
#include "estimators/parallel.hpp"
#include "records/scan.hpp"
#include "samplers/eta_sampler.hpp"

namespace recmax {
namespace {

void check_nonpositive(std::span<const double> x, int d, const char* who) {
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument(std::string(who) + ": vector dimension mismatch");
  }
  for (double v : x) {
    if (!(v <= 0.0)) {
      throw std::invalid_argument(std::string(who) + ": requires x <= 0");
    }
  }
}

std::string eta_method(const EtaSampler& sampler, const char* suffix) {
  return "eta:" + sampler.method() + ":" + suffix;
}

void attach_bias(Estimate& e, const EtaSampler& sampler) {
  if (const auto bias = sampler.bias_bound()) {
    e.bias_note = "max-stable draws truncated; per-draw df bias below " +
                  std::to_string(*bias);
  }
}

// E ||eta||_D by inclusion-exclusion over coordinate subsets: each margin's
// expected dual equals that margin's concurrence probability, estimated from
// shared generator draws E(||1/Z_T||_T^{-1} 1{Z_T > 0}).
Estimate weibull_limit_via_margins(const DependenceModel& model, long long n_samples,
                                   std::uint64_t seed, int workers) {
  const int d = model.dim();
  if (d > 10) {
    throw std::domain_error("generator-identity route: 3^d cost, needs d <= 10");
  }
  std::vector<DependenceModel> margins;
  std::vector<std::vector<int>> coords;
  const unsigned full = (1u << d) - 1u;
  margins.reserve(full);
  coords.reserve(full);
  for (unsigned mask = 1; mask <= full; ++mask) {
    std::vector<int> t;
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) t.push_back(i);
    }
    margins.push_back(model.margin(t));
    coords.push_back(std::move(t));
  }
  Estimate e = mc_mean(
      n_samples, seed, workers, "generator-identity:inclusion-exclusion",
      [&](Rng& rng) {
        thread_local std::vector<double> z, sub;
        z.resize(static_cast<std::size_t>(d));
        model.sample_generator(rng, z);
        KahanSum total;
        for (unsigned mask = 1; mask <= full; ++mask) {
          const auto& t = coords[mask - 1];
          sub.resize(t.size());
          bool positive = true;
          for (std::size_t j = 0; j < t.size(); ++j) {
            const double v = z[static_cast<std::size_t>(t[j])];
            if (!(v > 0.0)) {
              positive = false;
              break;
            }
            sub[j] = 1.0 / v;
          }
          if (!positive) continue;
          const double nrm = margins[mask - 1].norm(sub);
          if (!(nrm > 0.0)) continue;
          const double term = 1.0 / nrm;
          total.add(std::popcount(mask) % 2 == 1 ? term : -term);
        }
        return total.value();
      });
  return e;
}

}  // namespace

Estimate simple_record_limit(const DependenceModel& model, long long n_samples,
                             std::uint64_t seed, int workers, LimitRoute route) {
  const int d = model.dim();
  if (route == LimitRoute::kAuto) {
    route = model.family() == Family::kWeibullModel ? LimitRoute::kGeneratorIdentity
                                                    : LimitRoute::kEta;
  }
  if (route == LimitRoute::kGeneratorIdentity) {
    if (model.family() == Family::kLogistic) {
      // E ||eta||_lambda = E ||Z_W||_lambda for the Weibull generator with
      // matching exponent.
      const DependenceModel w = DependenceModel::weibull_model(model.parameter(), d);
      return mc_mean(n_samples, seed, workers, "generator-identity:weibull-draws",
                     [&](Rng& rng) {
                       thread_local std::vector<double> z;
                       z.resize(static_cast<std::size_t>(d));
                       w.sample_generator(rng, z);
                       return model.norm(z);
                     });
    }
    if (model.family() == Family::kWeibullModel) {
      return weibull_limit_via_margins(model, n_samples, seed, workers);
    }
    throw std::domain_error("generator-identity route: available for logistic/weibull");
  }
  EtaSampler sampler(model);
  Estimate e = mc_mean(n_samples, seed, workers, eta_method(sampler, "norm"),
                       [&](Rng& rng) {
                         thread_local std::vector<double> eta;
                         eta.resize(static_cast<std::size_t>(d));
                         sampler.sample(rng, eta);
                         return model.norm(eta);
                       });
  attach_bias(e, sampler);
  if (model.family() == Family::kWeibullModel) {
    e.bias_note = (e.bias_note ? *e.bias_note + "; " : std::string()) +
                  "advisory route, prefer the generator identity";
  }
  return e;
}

Estimate record_prob_maxstable_exact(const DependenceModel& model, long long n,
                                     long long n_samples, std::uint64_t seed,
                                     int workers) {
  if (n < 1) throw std::invalid_argument("record probability: n must be >= 1");
  const int d = model.dim();
  EtaSampler sampler(model);
  const double scale = static_cast<double>(n - 1);
  Estimate e = mc_mean(
      n_samples, seed, workers,
      eta_method(sampler, ("exp-norm(n=" + std::to_string(n) + ")").c_str()),
      [&](Rng& rng) {
        thread_local std::vector<double> eta;
        eta.resize(static_cast<std::size_t>(d));
        sampler.sample(rng, eta);
        return std::exp(-scale * model.norm(eta));
      });
  attach_bias(e, sampler);
  return e;
}

Estimate record_prob_cumsum(const DependenceModel& model, long long n,
                            long long n_samples, std::uint64_t seed, int workers) {
  if (n < 1) throw std::invalid_argument("record probability: n must be >= 1");
  const int d = model.dim();
  EtaSampler sampler(model);
  const double dn = static_cast<double>(n);
  Estimate e = mc_mean(
      n_samples, seed, workers,
      eta_method(sampler, ("geometric-sum(n=" + std::to_string(n) + ")").c_str()),
      [&](Rng& rng) {
        thread_local std::vector<double> eta;
        eta.resize(static_cast<std::size_t>(d));
        sampler.sample(rng, eta);
        const double w = model.norm(eta);
        // sum_{i=1..n} exp(-(i-1) w) for one draw.
        if (w < 1e-14) return dn;
        return std::expm1(-dn * w) / std::expm1(-w);
      });
  attach_bias(e, sampler);
  return e;
}

std::vector<GrowthRow> expected_records_growth(const CopulaModel& copula, long long n,
                                               long long reps, std::uint64_t seed,
                                               int workers,
                                               std::span<const long long> checkpoints) {
  if (reps < 2) throw std::invalid_argument("growth: reps must be >= 2");
  if (checkpoints.empty()) throw std::invalid_argument("growth: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw std::invalid_argument("growth: checkpoints must increase and stay in [1, n]");
    }
  }
  const int d = copula.dim();
  const std::size_t nck = checkpoints.size();
  struct Acc {
    std::vector<MomentAcc> simple, complete;
  };
  auto chunks = run_chunks<Acc>(
      reps, kChunks, seed, workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        Acc acc;
        acc.simple.resize(nck);
        acc.complete.resize(nck);
        std::vector<double> x(static_cast<std::size_t>(d));
        for (long long r = 0; r < count; ++r) {
          RecordScan scan(d, /*keep_times=*/false);
          std::size_t at = 0;
          for (long long i = 1; i <= n && at < nck; ++i) {
            copula.sample(rng, x);
            scan.push(x);
            if (i == checkpoints[at]) {
              acc.simple[at].add(static_cast<double>(scan.simple_count()));
              acc.complete[at].add(static_cast<double>(scan.complete_count()));
              ++at;
            }
          }
        }
        return acc;
      });
  Acc total;
  total.simple.resize(nck);
  total.complete.resize(nck);
  for (const Acc& c : chunks) {
    for (std::size_t i = 0; i < nck; ++i) {
      total.simple[i].merge(c.simple[i]);
      total.complete[i].merge(c.complete[i]);
    }
  }
  std::vector<GrowthRow> rows(nck);
  for (std::size_t i = 0; i < nck; ++i) {
    GrowthRow& row = rows[i];
    row.k = checkpoints[i];
    row.simple_mean = total.simple[i].mean;
    row.simple_se = total.simple[i].std_error();
    row.complete_mean = total.complete[i].mean;
    row.complete_se = total.complete[i].std_error();
    const double lk = std::log(static_cast<double>(row.k));
    if (lk > 0.0) {
      row.simple_ratio = row.simple_mean / lk;
      row.simple_ratio_se = row.simple_se / lk;
      row.complete_ratio = row.complete_mean / lk;
      row.complete_ratio_se = row.complete_se / lk;
    } else {
      row.simple_ratio = row.simple_ratio_se = NAN;
      row.complete_ratio = row.complete_ratio_se = NAN;
    }
  }
  return rows;
}

RoutedEstimate champion_survival(const DependenceModel& model, std::span<const double> x,
                                 long long n_samples, std::uint64_t seed, int workers) {
  const int d = model.dim();
  check_nonpositive(x, d, "champion survival");
  if (model.family() == Family::kIndependence && d >= 2) {
    throw std::domain_error("champion survival: zero concurrence under independence");
  }
  if (model.family() == Family::kCustom) {
    throw std::domain_error("champion survival: custom models lack a dual evaluation");
  }
  std::vector<double> xv(x.begin(), x.end());

  const auto eta_route = [&]() {
    EtaSampler sampler(model);
    Estimate e = mc_ratio(
        n_samples, mix_seed(seed, 0x65746172), workers, eta_method(sampler, "dual-ratio"),
        [&](Rng& rng, double& num, double& den) {
          thread_local std::vector<double> eta, mx;
          eta.resize(static_cast<std::size_t>(d));
          mx.resize(static_cast<std::size_t>(d));
          sampler.sample(rng, eta);
          for (int i = 0; i < d; ++i) {
            mx[static_cast<std::size_t>(i)] =
                std::max(eta[static_cast<std::size_t>(i)], xv[static_cast<std::size_t>(i)]);
          }
          num = model.dual(mx);
          den = model.dual(eta);
        });
    attach_bias(e, sampler);
    e.seed = seed;
    return e;
  };

  const auto generator_route = [&]() {
    Estimate e = mc_ratio(
        n_samples, mix_seed(seed, 0x67656e72), workers, "generator:exp-ratio",
        [&](Rng& rng, double& num, double& den) {
          thread_local std::vector<double> z, recip;
          z.resize(static_cast<std::size_t>(d));
          recip.resize(static_cast<std::size_t>(d));
          model.sample_generator(rng, z);
          double sup = -INFINITY;
          bool positive = true;
          for (int i = 0; i < d; ++i) {
            const double v = z[static_cast<std::size_t>(i)];
            if (!(v > 0.0)) {
              positive = false;
              break;
            }
            recip[static_cast<std::size_t>(i)] = 1.0 / v;
            sup = std::max(sup, xv[static_cast<std::size_t>(i)] * v);
          }
          if (!positive) {
            num = den = 0.0;
            return;
          }
          const double w = model.norm(recip);
          const double t = w > 0.0 ? 1.0 / w : 0.0;
          num = t * std::exp(w * sup);
          den = t;
        });
    e.value = 1.0 - e.value;
    e.seed = seed;
    return e;
  };

  RoutedEstimate out;
  if (model.family() == Family::kWeibullModel) {
    out.primary = generator_route();
    Estimate advisory = eta_route();
    advisory.bias_note = (advisory.bias_note ? *advisory.bias_note + "; " : std::string()) +
                         "advisory route, prefer the generator ratio";
    out.cross = std::move(advisory);
  } else {
    out.primary = eta_route();
    if (model.has_closed_forms()) out.cross = generator_route();
  }
  return out;
}

Estimate simple_record_limit_df(const DependenceModel& model, std::span<const double> x,
                                long long n_samples, std::uint64_t seed, int workers) {
  const int d = model.dim();
  check_nonpositive(x, d, "simple record df");
  if (model.family() == Family::kCustom) {
    throw std::domain_error("simple record df: custom models lack a norm evaluation");
  }
  std::vector<double> xv(x.begin(), x.end());
  const double norm_x = model.norm(xv);
  EtaSampler sampler(model);
  Estimate e = mc_ratio(
      n_samples, seed, workers, eta_method(sampler, "min-ratio"),
      [&](Rng& rng, double& num, double& den) {
        thread_local std::vector<double> eta, mn;
        eta.resize(static_cast<std::size_t>(d));
        mn.resize(static_cast<std::size_t>(d));
        sampler.sample(rng, eta);
        for (int i = 0; i < d; ++i) {
          mn[static_cast<std::size_t>(i)] =
              std::min(eta[static_cast<std::size_t>(i)], xv[static_cast<std::size_t>(i)]);
        }
        num = model.norm(mn);
        den = model.norm(eta);
      },
      norm_x);
  attach_bias(e, sampler);
  return e;
}

namespace {

// Shared driver for the windowed conditional routes: pools records with
// index k in (n/2, n], evaluating per-grid-point indicators of the rescaled
// record value; the ratio SE clusters by stream.
std::vector<Estimate> windowed_conditional(
    const CopulaModel& copula, const std::vector<std::vector<double>>& grid,
    long long n, long long reps, std::uint64_t seed, int workers, bool complete_only,
    bool survival) {
  const int d = copula.dim();
  if (n < 4) throw std::invalid_argument("conditional route: n must be >= 4");
  if (reps < 2) throw std::invalid_argument("conditional route: reps must be >= 2");
  if (grid.empty()) throw std::invalid_argument("conditional route: empty grid");
  for (const auto& g : grid) check_nonpositive(g, d, "conditional route");
  const std::size_t npts = grid.size();
  const long long lo = n / 2;  // window (n/2, n]
  struct Acc {
    std::vector<PairAcc> pts;
    long long records = 0;
  };
  auto chunks = run_chunks<Acc>(
      reps, kChunks, seed, workers,
      [&](int, std::uint64_t chunk_seed, long long count) {
        Rng rng(chunk_seed);
        Acc acc;
        acc.pts.resize(npts);
        std::vector<double> x(static_cast<std::size_t>(d));
        std::vector<double> hits(npts);
        for (long long r = 0; r < count; ++r) {
          RecordScan scan(d, /*keep_times=*/false);
          std::fill(hits.begin(), hits.end(), 0.0);
          double records = 0.0;
          for (long long i = 1; i <= n; ++i) {
            copula.sample(rng, x);
            const RecordScan::Flags f = scan.push(x);
            if (i <= lo || !(complete_only ? f.complete : f.simple)) continue;
            records += 1.0;
            const double k = static_cast<double>(i);
            for (std::size_t p = 0; p < npts; ++p) {
              bool hit = true;
              for (int j = 0; j < d; ++j) {
                const double scaled = k * (x[static_cast<std::size_t>(j)] - 1.0);
                const double bound = grid[p][static_cast<std::size_t>(j)];
                if (survival ? !(scaled > bound) : !(scaled <= bound)) {
                  hit = false;
                  break;
                }
              }
              if (hit) hits[p] += 1.0;
            }
          }
          for (std::size_t p = 0; p < npts; ++p) acc.pts[p].add(hits[p], records);
          acc.records += static_cast<long long>(records);
        }
        return acc;
      });
  Acc total;
  total.pts.resize(npts);
  for (const Acc& c : chunks) {
    for (std::size_t p = 0; p < npts; ++p) total.pts[p].merge(c.pts[p]);
    total.records += c.records;
  }
  if (total.records == 0) {
    throw std::runtime_error("conditional route: no records pooled in the window");
  }
  std::vector<Estimate> out(npts);
  const std::string method = std::string(complete_only ? "empirical-complete"
                                                       : "empirical-simple") +
                             ":n=" + std::to_string(n) + ":window=(n/2,n]";
  for (std::size_t p = 0; p < npts; ++p) {
    const PairAcc& a = total.pts[p];
    Estimate& e = out[p];
    const double nn = static_cast<double>(a.n);
    e.value = a.mean_x / a.mean_y;
    if (a.n > 1) {
      const double vx = a.m2_x / (nn - 1.0);
      const double vy = a.m2_y / (nn - 1.0);
      const double cv = a.cxy / (nn - 1.0);
      const double var =
          (vx - 2.0 * e.value * cv + e.value * e.value * vy) / (a.mean_y * a.mean_y);
      e.std_error = std::sqrt(std::max(var, 0.0) / nn);
    }
    e.n_samples = a.n;
    e.method = method;
    e.seed = seed;
    e.bias_note = "pooled " + std::to_string(total.records) + " records";
  }
  return out;
}

}  // namespace

Estimate champion_survival_empirical(const CopulaModel& copula, std::span<const double> x,
                                     long long n, long long reps, std::uint64_t seed,
                                     int workers) {
  std::vector<std::vector<double>> grid{std::vector<double>(x.begin(), x.end())};
  return windowed_conditional(copula, grid, n, reps, seed, workers,
                              /*complete_only=*/true, /*survival=*/true)[0];
}

std::vector<Estimate> simple_record_limit_df_empirical(
    const CopulaModel& copula, const std::vector<std::vector<double>>& grid,
    long long n, long long reps, std::uint64_t seed, int workers) {
  return windowed_conditional(copula, grid, n, reps, seed, workers,
                              /*complete_only=*/false, /*survival=*/false);
}

std::optional<double> champion_survival_closed_form(const DependenceModel& model,
                                                    std::span<const double> x) {
  const int d = model.dim();
  check_nonpositive(x, d, "champion survival");
  const double mx = *std::max_element(x.begin(), x.end());
  switch (model.family()) {
    case Family::kComonotone:
      return 1.0 - std::exp(mx);
    case Family::kMarshallOlkin: {
      const double g = model.parameter();
      return 1.0 - std::exp((g + d * (1.0 - g)) * mx);
    }
    default:
      return std::nullopt;
  }
}

std::optional<double> simple_record_limit_df_closed_form(const DependenceModel& model,
                                                         std::span<const double> x) {
  const int d = model.dim();
  check_nonpositive(x, d, "simple record df");
  switch (model.family()) {
    case Family::kComonotone:
      return std::exp(*std::min_element(x.begin(), x.end()));
    case Family::kIndependence: {
      KahanSum s;
      for (double v : x) s.add(std::exp(v));
      return s.value() / static_cast<double>(d);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace recmax
