#include "recmax/recmax.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/rng.hpp"
#include "dnorm/dependence_model.hpp"
#include "estimators/concurrence.hpp"
#include "estimators/estimate.hpp"
#include "estimators/record_limits.hpp"
#include "estimators/record_times.hpp"
#include "records/io.hpp"
#include "records/law_checks.hpp"
#include "records/margins.hpp"
#include "records/scan.hpp"
#include "samplers/copula.hpp"
#include "samplers/eta_sampler.hpp"

struct recmax_rng {
  recmax::Rng* impl;
  bool owned;
};

struct recmax_model {
  recmax::DependenceModel impl;
};

struct recmax_copula {
  recmax::CopulaModel impl;
};

struct recmax_scan {
  recmax::RecordScan impl;
};

namespace {

using ordered_json = nlohmann::ordered_json;

thread_local std::string g_error;

recmax_status fail(recmax_status status, const char* message) {
  g_error = message ? message : "";
  return status;
}

template <typename Fn>
recmax_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(RECMAX_EINVAL, e.what());
  } catch (const std::domain_error& e) {
    return fail(RECMAX_EDOMAIN, e.what());
  } catch (const std::exception& e) {
    return fail(RECMAX_ERUNTIME, e.what());
  } catch (...) {
    return fail(RECMAX_ERUNTIME, "unknown error");
  }
}

// All reported doubles pass through a 12-significant-digit round trip so JSON
// output is byte-stable across platforms.
double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

ordered_json j12(double v) {
  if (std::isnan(v)) return nullptr;
  return round12(v);
}

void copy_str(char* dst, std::size_t cap, const std::string& src) {
  std::size_t n = src.size() < cap - 1 ? src.size() : cap - 1;
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

void fill_estimate(const recmax::Estimate& e, recmax_estimate* out) {
  out->value = e.value;
  out->std_error = e.std_error;
  out->n_samples = e.n_samples;
  out->seed = e.seed;
  copy_str(out->method, sizeof out->method, e.method);
  copy_str(out->bias_note, sizeof out->bias_note, e.bias_note ? *e.bias_note : std::string());
  out->has_divergence_flag = e.divergence_flag.has_value() ? 1 : 0;
  out->divergence_flag = e.divergence_flag.value_or(false) ? 1 : 0;
}

void zero_estimate(recmax_estimate* out) {
  std::memset(out, 0, sizeof *out);
}

ordered_json estimate_json(const recmax::Estimate& e) {
  ordered_json j;
  j["value"] = j12(e.value);
  j["std_error"] = j12(e.std_error);
  j["n_samples"] = e.n_samples;
  j["method"] = e.method;
  j["seed"] = e.seed;
  if (e.bias_note) j["bias_note"] = *e.bias_note;
  if (e.divergence_flag) j["divergence_flag"] = *e.divergence_flag;
  return j;
}

recmax_status make_string(const std::string& s, char** out) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) return fail(RECMAX_ERUNTIME, "out of memory");
  std::memcpy(p, s.c_str(), s.size() + 1);
  *out = p;
  return RECMAX_OK;
}

recmax_status make_json(const ordered_json& j, char** out) {
  return make_string(j.dump(), out);
}

ordered_json summary_json(const recmax::RecordSummary& s) {
  ordered_json j;
  j["dim"] = s.dim;
  j["n"] = s.n;
  j["simple_count"] = static_cast<long long>(s.simple_record_times.size());
  j["complete_count"] = static_cast<long long>(s.complete_record_times.size());
  j["simple_record_times"] = s.simple_record_times;
  j["complete_record_times"] = s.complete_record_times;
  j["simple_gaps"] = s.simple_gaps();
  if (s.champion_index) {
    j["champion_index"] = *s.champion_index;
  } else {
    j["champion_index"] = nullptr;
  }
  return j;
}

std::span<const double> vec_span(const double* x, int d) {
  return {x, static_cast<std::size_t>(d)};
}

}  // namespace

extern "C" {

const char* recmax_last_error(void) { return g_error.c_str(); }

const char* recmax_version(void) { return "0.1.0"; }

void recmax_string_free(char* s) { std::free(s); }

uint64_t recmax_mix_seed(uint64_t seed, uint64_t stream) { return recmax::mix_seed(seed, stream); }

/* ------------------------------------------------------------------ rng */

recmax_rng* recmax_rng_new(uint64_t seed) {
  try {
    return new recmax_rng{new recmax::Rng(seed), true};
  } catch (...) {
    return nullptr;
  }
}

void recmax_rng_free(recmax_rng* rng) {
  if (!rng) return;
  if (rng->owned) delete rng->impl;
  delete rng;
}

double recmax_rng_uniform(recmax_rng* rng) {
  return rng ? rng->impl->uniform_open() : 0.0;
}

/* --------------------------------------------------------------- models */

recmax_status recmax_model_parse(const char* descriptor, int fallback_dim, recmax_model** out) {
  if (!descriptor || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    *out = new recmax_model{recmax::DependenceModel::parse(descriptor, fallback_dim)};
    return RECMAX_OK;
  });
}

recmax_status recmax_model_custom(int d, recmax_generator_fn fn, void* ctx, const double* bound,
                                  recmax_model** out) {
  if (!fn || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    std::optional<double> b;
    if (bound) b = *bound;
    auto wrapped = [fn, ctx](recmax::Rng& rng, std::span<double> z) {
      recmax_rng view{&rng, false};
      fn(ctx, &view, z.data(), static_cast<int>(z.size()));
    };
    *out = new recmax_model{recmax::DependenceModel::custom(d, wrapped, b)};
    return RECMAX_OK;
  });
}

void recmax_model_free(recmax_model* m) { delete m; }

int recmax_model_dim(const recmax_model* m) { return m ? m->impl.dim() : 0; }

recmax_status recmax_model_descriptor(const recmax_model* m, char* buf, size_t cap) {
  if (!m || !buf || cap == 0) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    std::string s = m->impl.descriptor();
    if (s.size() + 1 > cap) return fail(RECMAX_EINVAL, "descriptor buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return RECMAX_OK;
  });
}

} /* extern "C" */

namespace {

recmax_status model_eval(const recmax_model* m, const double* x, int d, double* out,
                         double (*eval)(const recmax::DependenceModel&, std::span<const double>)) {
  if (!m || !x || !out) return fail(RECMAX_EINVAL, "null argument");
  if (d != m->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    *out = eval(m->impl, vec_span(x, d));
    return RECMAX_OK;
  });
}

}  // namespace

extern "C" {

recmax_status recmax_norm(const recmax_model* m, const double* x, int d, double* out) {
  return model_eval(m, x, d, out,
                    +[](const recmax::DependenceModel& mm, std::span<const double> xx) {
                      return mm.norm(xx);
                    });
}

recmax_status recmax_dual(const recmax_model* m, const double* x, int d, double* out) {
  return model_eval(m, x, d, out,
                    +[](const recmax::DependenceModel& mm, std::span<const double> xx) {
                      return mm.dual(xx);
                    });
}

recmax_status recmax_norm_ie(const recmax_model* m, const double* x, int d, double* out) {
  return model_eval(m, x, d, out, &recmax::norm_via_inclusion_exclusion);
}

recmax_status recmax_dual_ie(const recmax_model* m, const double* x, int d, double* out) {
  return model_eval(m, x, d, out, &recmax::dual_via_inclusion_exclusion);
}

recmax_status recmax_concurrence_closed_form(const recmax_model* m, double* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto v = m->impl.concurrence_closed_form();
    if (!v) return RECMAX_ABSENT;
    *out = *v;
    return RECMAX_OK;
  });
}

recmax_status recmax_expected_norm_closed_form(const recmax_model* m, double* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto v = m->impl.expected_norm_closed_form();
    if (!v) return RECMAX_ABSENT;
    *out = *v;
    return RECMAX_OK;
  });
}

recmax_status recmax_sample_generator(const recmax_model* m, recmax_rng* rng, double* out,
                                      long long rows) {
  if (!m || !rng || !out || rows < 0) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    int d = m->impl.dim();
    for (long long i = 0; i < rows; ++i) {
      m->impl.sample_generator(*rng->impl,
                               std::span<double>(out + i * d, static_cast<std::size_t>(d)));
    }
    return RECMAX_OK;
  });
}

recmax_status recmax_sample_eta(const recmax_model* m, recmax_rng* rng, double* out,
                                long long rows) {
  if (!m || !rng || !out || rows < 0) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    recmax::EtaSampler sampler(m->impl);
    int d = m->impl.dim();
    for (long long i = 0; i < rows; ++i) {
      sampler.sample(*rng->impl, std::span<double>(out + i * d, static_cast<std::size_t>(d)));
    }
    return RECMAX_OK;
  });
}

/* -------------------------------------------------------------- copulas */

recmax_status recmax_copula_parse(const char* descriptor, int fallback_dim, recmax_copula** out) {
  if (!descriptor || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    *out = new recmax_copula{recmax::CopulaModel::parse(descriptor, fallback_dim)};
    return RECMAX_OK;
  });
}

recmax_status recmax_copula_msc(const recmax_model* m, recmax_copula** out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    *out = new recmax_copula{recmax::CopulaModel::max_stable(m->impl)};
    return RECMAX_OK;
  });
}

void recmax_copula_free(recmax_copula* c) { delete c; }

int recmax_copula_dim(const recmax_copula* c) { return c ? c->impl.dim() : 0; }

recmax_status recmax_copula_descriptor(const recmax_copula* c, char* buf, size_t cap) {
  if (!c || !buf || cap == 0) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    std::string s = c->impl.descriptor();
    if (s.size() + 1 > cap) return fail(RECMAX_EINVAL, "descriptor buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return RECMAX_OK;
  });
}

int recmax_copula_has_cdf(const recmax_copula* c) { return c && c->impl.has_cdf() ? 1 : 0; }

recmax_status recmax_copula_cdf(const recmax_copula* c, const double* u, int d, double* out) {
  if (!c || !u || !out) return fail(RECMAX_EINVAL, "null argument");
  if (d != c->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    *out = c->impl.cdf(vec_span(u, d));
    return RECMAX_OK;
  });
}

recmax_status recmax_copula_sample(const recmax_copula* c, recmax_rng* rng, double* out,
                                   long long rows) {
  if (!c || !rng || !out || rows < 0) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    int d = c->impl.dim();
    for (long long i = 0; i < rows; ++i) {
      c->impl.sample(*rng->impl, std::span<double>(out + i * d, static_cast<std::size_t>(d)));
    }
    return RECMAX_OK;
  });
}

/* -------------------------------------------------------------- records */

recmax_scan* recmax_scan_new(int d) {
  if (d < 1) return nullptr;
  try {
    return new recmax_scan{recmax::RecordScan(d)};
  } catch (...) {
    return nullptr;
  }
}

void recmax_scan_free(recmax_scan* s) { delete s; }

recmax_status recmax_scan_push(recmax_scan* s, const double* x, int d, int* simple,
                               int* complete) {
  if (!s || !x) return fail(RECMAX_EINVAL, "null argument");
  if (d != s->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    auto flags = s->impl.push(vec_span(x, d));
    if (simple) *simple = flags.simple ? 1 : 0;
    if (complete) *complete = flags.complete ? 1 : 0;
    return RECMAX_OK;
  });
}

recmax_status recmax_scan_champion(const recmax_scan* s, long long* out) {
  if (!s || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto c = s->impl.champion();
    if (!c) return RECMAX_ABSENT;
    *out = *c;
    return RECMAX_OK;
  });
}

recmax_status recmax_scan_summary_json(const recmax_scan* s, char** out_json) {
  if (!s || !out_json) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] { return make_json(summary_json(s->impl.summary()), out_json); });
}

recmax_status recmax_scan_rows_json(const double* rows, long long n, int d, char** out_json) {
  if (!rows || !out_json) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto s = recmax::scan_records(
        std::span<const double>(rows, static_cast<std::size_t>(n) * d), n, d);
    return make_json(summary_json(s), out_json);
  });
}

recmax_status recmax_read_rows(const char* path, double** out_rows, long long* out_n,
                               int* out_d) {
  if (!path || !out_rows || !out_n || !out_d) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    recmax::Dataset data = std::strcmp(path, "-") == 0 ? recmax::read_rows(std::cin, "stdin")
                                                       : recmax::read_rows_file(path);
    auto* buf = static_cast<double*>(std::malloc(data.rows.size() * sizeof(double)));
    if (!buf) return fail(RECMAX_ERUNTIME, "out of memory");
    std::memcpy(buf, data.rows.data(), data.rows.size() * sizeof(double));
    *out_rows = buf;
    *out_n = data.n;
    *out_d = data.dim;
    return RECMAX_OK;
  });
}

void recmax_rows_free(double* rows) { std::free(rows); }

recmax_status recmax_write_rows_csv(const char* path, const double* rows, long long n, int d) {
  if (!path || !rows || n < 0 || d < 1) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    auto span = std::span<const double>(rows, static_cast<std::size_t>(n) * d);
    if (std::strcmp(path, "-") == 0) {
      recmax::write_rows_csv(std::cout, span, n, d);
      std::cout.flush();
    } else {
      std::ofstream out(path);
      if (!out) throw std::runtime_error(std::string("cannot open ") + path);
      recmax::write_rows_csv(out, span, n, d);
    }
    return RECMAX_OK;
  });
}

recmax_status recmax_pit_transform(const double* rows, long long n, int d, const char* margins,
                                   double* out) {
  if (!rows || !margins || !out || n < 1 || d < 1) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    auto specs = recmax::parse_margins(margins, d);
    auto u = recmax::pit_transform(
        std::span<const double>(rows, static_cast<std::size_t>(n) * d), n, d, specs);
    std::memcpy(out, u.data(), u.size() * sizeof(double));
    return RECMAX_OK;
  });
}

/* ----------------------------------------------------------- estimators */

recmax_status recmax_concurrence_via_generator(const recmax_model* m, long long n_samples,
                                               uint64_t seed, int workers,
                                               recmax_estimate* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    fill_estimate(recmax::concurrence_via_generator(m->impl, n_samples, seed, workers), out);
    return RECMAX_OK;
  });
}

recmax_status recmax_concurrence_via_eta(const recmax_model* m, long long n_samples,
                                         uint64_t seed, int workers, recmax_estimate* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    fill_estimate(recmax::concurrence_via_eta(m->impl, n_samples, seed, workers), out);
    return RECMAX_OK;
  });
}

recmax_status recmax_concurrence_empirical(const recmax_copula* c, long long n, long long reps,
                                           uint64_t seed, int workers, recmax_estimate* p_n,
                                           recmax_estimate* n_pi_bar) {
  if (!c || !p_n) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto r = recmax::concurrence_empirical(c->impl, n, reps, seed, workers);
    fill_estimate(r.p_n, p_n);
    if (n_pi_bar) fill_estimate(r.n_pi_bar, n_pi_bar);
    return RECMAX_OK;
  });
}

recmax_status recmax_simple_record_limit(const recmax_model* m, long long n_samples,
                                         uint64_t seed, int workers, int route,
                                         recmax_estimate* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    recmax::LimitRoute r;
    switch (route) {
      case 0: r = recmax::LimitRoute::kAuto; break;
      case 1: r = recmax::LimitRoute::kEta; break;
      case 2: r = recmax::LimitRoute::kGeneratorIdentity; break;
      default: return fail(RECMAX_EINVAL, "route must be 0 (auto), 1 (eta), or 2 (generator)");
    }
    fill_estimate(recmax::simple_record_limit(m->impl, n_samples, seed, workers, r), out);
    return RECMAX_OK;
  });
}

recmax_status recmax_record_prob_maxstable_exact(const recmax_model* m, long long n,
                                                 long long n_samples, uint64_t seed, int workers,
                                                 recmax_estimate* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    fill_estimate(recmax::record_prob_maxstable_exact(m->impl, n, n_samples, seed, workers), out);
    return RECMAX_OK;
  });
}

recmax_status recmax_record_prob_cumsum(const recmax_model* m, long long n, long long n_samples,
                                        uint64_t seed, int workers, recmax_estimate* out) {
  if (!m || !out) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    fill_estimate(recmax::record_prob_cumsum(m->impl, n, n_samples, seed, workers), out);
    return RECMAX_OK;
  });
}

recmax_status recmax_champion_survival(const recmax_model* m, const double* x, int d,
                                       long long n_samples, uint64_t seed, int workers,
                                       recmax_estimate* primary, recmax_estimate* cross,
                                       int* has_cross) {
  if (!m || !x || !primary) return fail(RECMAX_EINVAL, "null argument");
  if (d != m->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    auto r = recmax::champion_survival(m->impl, vec_span(x, d), n_samples, seed, workers);
    fill_estimate(r.primary, primary);
    if (has_cross) *has_cross = r.cross ? 1 : 0;
    if (cross) {
      if (r.cross) {
        fill_estimate(*r.cross, cross);
      } else {
        zero_estimate(cross);
      }
    }
    return RECMAX_OK;
  });
}

recmax_status recmax_simple_record_limit_df(const recmax_model* m, const double* x, int d,
                                            long long n_samples, uint64_t seed, int workers,
                                            recmax_estimate* out) {
  if (!m || !x || !out) return fail(RECMAX_EINVAL, "null argument");
  if (d != m->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    fill_estimate(recmax::simple_record_limit_df(m->impl, vec_span(x, d), n_samples, seed, workers),
                  out);
    return RECMAX_OK;
  });
}

recmax_status recmax_champion_survival_closed_form(const recmax_model* m, const double* x, int d,
                                                   double* out) {
  if (!m || !x || !out) return fail(RECMAX_EINVAL, "null argument");
  if (d != m->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    auto v = recmax::champion_survival_closed_form(m->impl, vec_span(x, d));
    if (!v) return RECMAX_ABSENT;
    *out = *v;
    return RECMAX_OK;
  });
}

recmax_status recmax_simple_record_limit_df_closed_form(const recmax_model* m, const double* x,
                                                        int d, double* out) {
  if (!m || !x || !out) return fail(RECMAX_EINVAL, "null argument");
  if (d != m->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    auto v = recmax::simple_record_limit_df_closed_form(m->impl, vec_span(x, d));
    if (!v) return RECMAX_ABSENT;
    *out = *v;
    return RECMAX_OK;
  });
}

recmax_status recmax_champion_survival_empirical(const recmax_copula* c, const double* x, int d,
                                                 long long n, long long reps, uint64_t seed,
                                                 int workers, recmax_estimate* out) {
  if (!c || !x || !out) return fail(RECMAX_EINVAL, "null argument");
  if (d != c->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    fill_estimate(
        recmax::champion_survival_empirical(c->impl, vec_span(x, d), n, reps, seed, workers),
        out);
    return RECMAX_OK;
  });
}

recmax_status recmax_simple_record_limit_df_empirical(const recmax_copula* c, const double* grid,
                                                      int n_points, int d, long long n,
                                                      long long reps, uint64_t seed, int workers,
                                                      recmax_estimate* out_estimates) {
  if (!c || !grid || !out_estimates || n_points < 1) return fail(RECMAX_EINVAL, "bad argument");
  if (d != c->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    std::vector<std::vector<double>> points(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
      points[i].assign(grid + static_cast<std::size_t>(i) * d,
                       grid + static_cast<std::size_t>(i + 1) * d);
    }
    auto r = recmax::simple_record_limit_df_empirical(c->impl, points, n, reps, seed, workers);
    for (int i = 0; i < n_points; ++i) fill_estimate(r[i], out_estimates + i);
    return RECMAX_OK;
  });
}

recmax_status recmax_expected_records_growth_json(const recmax_copula* c, long long n,
                                                  long long reps, uint64_t seed, int workers,
                                                  const long long* checkpoints, int n_checkpoints,
                                                  char** out_json) {
  if (!c || !checkpoints || !out_json || n_checkpoints < 1) {
    return fail(RECMAX_EINVAL, "bad argument");
  }
  return guarded([&] {
    auto rows = recmax::expected_records_growth(
        c->impl, n, reps, seed, workers,
        std::span<const long long>(checkpoints, static_cast<std::size_t>(n_checkpoints)));
    ordered_json out;
    out["n"] = n;
    out["reps"] = reps;
    out["seed"] = seed;
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json row;
      row["k"] = r.k;
      row["simple_mean"] = j12(r.simple_mean);
      row["simple_se"] = j12(r.simple_se);
      row["complete_mean"] = j12(r.complete_mean);
      row["complete_se"] = j12(r.complete_se);
      row["simple_ratio"] = j12(r.simple_ratio);
      row["simple_ratio_se"] = j12(r.simple_ratio_se);
      row["complete_ratio"] = j12(r.complete_ratio);
      row["complete_ratio_se"] = j12(r.complete_ratio_se);
      arr.push_back(std::move(row));
    }
    out["rows"] = std::move(arr);
    return make_json(out, out_json);
  });
}

recmax_status recmax_expected_n2_json(const recmax_copula* c, long long n_samples, uint64_t seed,
                                      int workers, long long cap, char** out_json) {
  if (!c || !out_json) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto r = recmax::expected_N2(c->impl, n_samples, seed, workers, cap);
    ordered_json out;
    out["integral_route"] =
        r.integral_route ? estimate_json(*r.integral_route) : ordered_json(nullptr);
    out["direct_route"] = estimate_json(r.direct_route);
    out["tail_slope"] = j12(r.tail_slope);
    out["divergence_flag"] = r.divergence_flag;
    ordered_json arr = ordered_json::array();
    for (const auto& t : r.tail) {
      ordered_json row;
      row["k"] = t.k;
      row["survival"] = j12(t.survival);
      row["se"] = j12(t.se);
      row["count"] = t.count;
      arr.push_back(std::move(row));
    }
    out["tail"] = std::move(arr);
    return make_json(out, out_json);
  });
}

} /* extern "C" */

namespace {

ordered_json chi_bar_json_rows(const std::vector<recmax::ChiBarRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row;
    row["u"] = j12(r.u);
    row["chi_bar"] = j12(r.chi_bar);
    row["se"] = j12(r.se);
    row["exceedances"] = r.exceedances;
    row["low_count"] = r.low_count;
    arr.push_back(std::move(row));
  }
  ordered_json out;
  out["rows"] = std::move(arr);
  return out;
}

}  // namespace

extern "C" {

recmax_status recmax_chi_bar_json(const recmax_copula* c, const double* u_grid, int n_points,
                                  long long n_samples, uint64_t seed, int workers,
                                  char** out_json) {
  if (!c || !u_grid || !out_json || n_points < 1) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    auto rows = recmax::chi_bar(
        c->impl, std::span<const double>(u_grid, static_cast<std::size_t>(n_points)), n_samples,
        seed, workers);
    return make_json(chi_bar_json_rows(rows), out_json);
  });
}

recmax_status recmax_chi_bar_rows_json(const double* rows, long long n, int d,
                                       const double* u_grid, int n_points, char** out_json) {
  if (!rows || !u_grid || !out_json || n_points < 1) return fail(RECMAX_EINVAL, "bad argument");
  return guarded([&] {
    auto result = recmax::chi_bar_from_rows(
        std::span<const double>(rows, static_cast<std::size_t>(n) * d), n, d,
        std::span<const double>(u_grid, static_cast<std::size_t>(n_points)));
    return make_json(chi_bar_json_rows(result), out_json);
  });
}

recmax_status recmax_second_record_df_json(const recmax_copula* c, const double* x, int d,
                                           long long n_samples, uint64_t seed, int workers,
                                           char** out_json) {
  if (!c || !x || !out_json) return fail(RECMAX_EINVAL, "null argument");
  if (d != c->impl.dim()) return fail(RECMAX_EINVAL, "dimension mismatch");
  return guarded([&] {
    auto r = recmax::second_record_df(c->impl, vec_span(x, d), n_samples, seed, workers);
    ordered_json out;
    out["formula_route"] =
        r.formula_route ? estimate_json(*r.formula_route) : ordered_json(nullptr);
    out["direct_route"] = estimate_json(r.direct_route);
    return make_json(out, out_json);
  });
}

recmax_status recmax_gap_law_check_json(const recmax_copula* c, int n_records, long long streams,
                                        uint64_t seed, char** out_json) {
  if (!c || !out_json) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto r = recmax::conditional_gap_law_check(c->impl, n_records, streams, seed);
    ordered_json out;
    out["streams"] = r.streams;
    out["gaps"] = r.gaps;
    out["skipped"] = r.skipped;
    out["state_cutoff"] = j12(r.state_cutoff);
    out["max_z"] = j12(r.max_z);
    out["max_cat_z"] = j12(r.max_cat_z);
    out["pass"] = r.pass;
    ordered_json arr = ordered_json::array();
    for (const auto& b : r.bins) {
      ordered_json row;
      row["count"] = b.count;
      row["c_lo"] = j12(b.c_lo);
      row["c_hi"] = j12(b.c_hi);
      row["c_mean"] = j12(b.c_mean);
      row["categories"] = b.categories;
      row["chisq"] = j12(b.chisq);
      row["z"] = j12(b.z);
      row["max_cat_z"] = j12(b.max_cat_z);
      arr.push_back(std::move(row));
    }
    out["bins"] = std::move(arr);
    return make_json(out, out_json);
  });
}

recmax_status recmax_monotonicity_check_json(const recmax_copula* c, int max_n, long long streams,
                                             uint64_t seed, char** out_json) {
  if (!c || !out_json) return fail(RECMAX_EINVAL, "null argument");
  return guarded([&] {
    auto r = recmax::stochastic_monotonicity_check(c->impl, max_n, streams, seed);
    ordered_json out;
    out["max_n"] = r.max_n;
    out["t_max"] = r.t_max;
    out["streams"] = r.streams;
    out["truncated_streams"] = r.truncated_streams;
    out["min_z"] = j12(r.min_z);
    out["pass"] = r.pass;
    ordered_json arr = ordered_json::array();
    for (const auto& cell : r.worst_per_n) {
      ordered_json row;
      row["n"] = cell.n;
      row["t"] = cell.t;
      row["p_n"] = j12(cell.p_n);
      row["p_next"] = j12(cell.p_next);
      row["diff"] = j12(cell.diff);
      row["se"] = j12(cell.se);
      row["z"] = j12(cell.z);
      arr.push_back(std::move(row));
    }
    out["worst_per_n"] = std::move(arr);
    return make_json(out, out_json);
  });
}

} /* extern "C" */
