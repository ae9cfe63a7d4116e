#ifndef RECMAX_RECMAX_H
#define RECMAX_RECMAX_H

/* C interface to the records-and-champions toolkit.
 *
 * Conventions:
 *  - Every fallible call returns a recmax_status; RECMAX_OK means the output
 *    parameters are valid.  recmax_last_error() describes the most recent
 *    failure on the calling thread.
 *  - RECMAX_ABSENT is not an error: it reports that a quantity has no value
 *    (no closed form, no champion).
 *  - char** results are heap strings released with recmax_string_free().
 *  - Estimator work is divided into a fixed chunk grid; chunk c draws from
 *    recmax_mix_seed(seed, c) and reduction order is fixed, so results do
 *    not depend on the worker count (workers <= 0 picks a default from the
 *    RECMAX_WORKERS environment variable or the hardware).
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum recmax_status {
  RECMAX_OK = 0,
  RECMAX_EINVAL = 1,   /* bad argument or descriptor */
  RECMAX_EDOMAIN = 2,  /* operation undefined for this model */
  RECMAX_ERUNTIME = 3, /* numeric or resource failure */
  RECMAX_ABSENT = 4,   /* no value exists */
} recmax_status;

const char* recmax_last_error(void);
const char* recmax_version(void);
void recmax_string_free(char* s);

/* Published substream map used for chunk seeding. */
uint64_t recmax_mix_seed(uint64_t seed, uint64_t stream);

/* ------------------------------------------------------------------ rng */

typedef struct recmax_rng recmax_rng;

recmax_rng* recmax_rng_new(uint64_t seed);
void recmax_rng_free(recmax_rng* rng);
double recmax_rng_uniform(recmax_rng* rng); /* strictly inside (0,1) */

/* --------------------------------------------------------------- models */

/* Dependence model: a D-norm E max_i |x_i| Z_i together with its dual
 * E min_i |x_i| Z_i and generator sampler.  Descriptor grammar:
 * "logistic:<lambda>" (lambda > 1), "weibull:<alpha>" (alpha > 0),
 * "bernoulli:<beta>" (beta in (0,1]), "mo:<gamma>" (gamma in (0,1)),
 * "indep", "comonotone"; all take an optional ":d=<n>" suffix, else the
 * dimension comes from fallback_dim. */
typedef struct recmax_model recmax_model;

recmax_status recmax_model_parse(const char* descriptor, int fallback_dim,
                                 recmax_model** out);

/* Custom generator: fn fills out[0..d) with one nonnegative draw whose
 * components have unit mean.  fn may be called concurrently from several
 * threads (each with its own rng) and must be re-entrant.  bound, when
 * non-null, declares an almost-sure bound on max_i Z_i and enables exact
 * max-stable sampling. */
typedef void (*recmax_generator_fn)(void* ctx, recmax_rng* rng, double* out, int d);
recmax_status recmax_model_custom(int d, recmax_generator_fn fn, void* ctx,
                                  const double* bound, recmax_model** out);

void recmax_model_free(recmax_model* m);
int recmax_model_dim(const recmax_model* m);
recmax_status recmax_model_descriptor(const recmax_model* m, char* buf, size_t cap);

recmax_status recmax_norm(const recmax_model* m, const double* x, int d, double* out);
recmax_status recmax_dual(const recmax_model* m, const double* x, int d, double* out);

/* Inclusion-exclusion cross-evaluations (d <= 20), oracles for the above. */
recmax_status recmax_norm_ie(const recmax_model* m, const double* x, int d, double* out);
recmax_status recmax_dual_ie(const recmax_model* m, const double* x, int d, double* out);

/* RECMAX_ABSENT when the family has no closed form. */
recmax_status recmax_concurrence_closed_form(const recmax_model* m, double* out);
recmax_status recmax_expected_norm_closed_form(const recmax_model* m, double* out);

/* rows draws written row-major into out[0..rows*d). */
recmax_status recmax_sample_generator(const recmax_model* m, recmax_rng* rng,
                                      double* out, long long rows);
recmax_status recmax_sample_eta(const recmax_model* m, recmax_rng* rng, double* out,
                                long long rows);

/* -------------------------------------------------------------- copulas */

/* Descriptor grammar: "product", "comonotone", "gumbel:<lambda>",
 * "gaussian:<rho>", "msc:<model descriptor>", optional ":d=<n>". */
typedef struct recmax_copula recmax_copula;

recmax_status recmax_copula_parse(const char* descriptor, int fallback_dim,
                                  recmax_copula** out);
/* Max-stable copula of an existing model (for custom generators). */
recmax_status recmax_copula_msc(const recmax_model* m, recmax_copula** out);

void recmax_copula_free(recmax_copula* c);
int recmax_copula_dim(const recmax_copula* c);
recmax_status recmax_copula_descriptor(const recmax_copula* c, char* buf, size_t cap);

int recmax_copula_has_cdf(const recmax_copula* c);
recmax_status recmax_copula_cdf(const recmax_copula* c, const double* u, int d,
                                double* out);
recmax_status recmax_copula_sample(const recmax_copula* c, recmax_rng* rng, double* out,
                                   long long rows);

/* -------------------------------------------------------------- records */

typedef struct recmax_scan recmax_scan;

recmax_scan* recmax_scan_new(int d);
void recmax_scan_free(recmax_scan* s);
/* simple/complete flags are 0/1 outputs; either pointer may be null. */
recmax_status recmax_scan_push(recmax_scan* s, const double* x, int d, int* simple,
                               int* complete);
/* 1-based champion index; RECMAX_ABSENT when no observation dominates. */
recmax_status recmax_scan_champion(const recmax_scan* s, long long* out);
recmax_status recmax_scan_summary_json(const recmax_scan* s, char** out_json);

/* One-shot scan of a row-major n x d batch. */
recmax_status recmax_scan_rows_json(const double* rows, long long n, int d,
                                    char** out_json);

/* Dataset IO.  path "-" means stdin / stdout.  Input is CSV with header
 * x1,...,xd or NDJSON rows of numeric arrays (sniffed from the first line).
 * *out_rows receives a row-major n x d buffer owned by the caller and
 * released with recmax_rows_free(). */
recmax_status recmax_read_rows(const char* path, double** out_rows, long long* out_n,
                               int* out_d);
void recmax_rows_free(double* rows);
recmax_status recmax_write_rows_csv(const char* path, const double* rows, long long n,
                                    int d);

/* Componentwise probability-integral transform.  margins is a comma list of
 * per-coordinate specs ("rank", "normal[:mu:sigma]", "exp[:rate]",
 * "uniform[:a:b]", "frechet:alpha", "gumbel[:mu:beta]"), or one spec for
 * all coordinates.  out receives n*d transformed values. */
recmax_status recmax_pit_transform(const double* rows, long long n, int d,
                                   const char* margins, double* out);

/* ----------------------------------------------------------- estimators */

typedef struct recmax_estimate {
  double value;
  double std_error;
  long long n_samples;
  uint64_t seed;
  char method[64];
  char bias_note[192];      /* empty when absent */
  int has_divergence_flag;  /* 0/1 */
  int divergence_flag;
} recmax_estimate;

recmax_status recmax_concurrence_via_generator(const recmax_model* m,
                                               long long n_samples, uint64_t seed,
                                               int workers, recmax_estimate* out);
recmax_status recmax_concurrence_via_eta(const recmax_model* m, long long n_samples,
                                         uint64_t seed, int workers,
                                         recmax_estimate* out);
/* n_pi_bar may be null. */
recmax_status recmax_concurrence_empirical(const recmax_copula* c, long long n,
                                           long long reps, uint64_t seed, int workers,
                                           recmax_estimate* p_n,
                                           recmax_estimate* n_pi_bar);

/* route: 0 auto, 1 max-stable draws, 2 generator identity. */
recmax_status recmax_simple_record_limit(const recmax_model* m, long long n_samples,
                                         uint64_t seed, int workers, int route,
                                         recmax_estimate* out);

recmax_status recmax_record_prob_maxstable_exact(const recmax_model* m, long long n,
                                                 long long n_samples, uint64_t seed,
                                                 int workers, recmax_estimate* out);
recmax_status recmax_record_prob_cumsum(const recmax_model* m, long long n,
                                        long long n_samples, uint64_t seed, int workers,
                                        recmax_estimate* out);

/* cross/has_cross may be null; when present *has_cross reports whether the
 * second route exists for this family. */
recmax_status recmax_champion_survival(const recmax_model* m, const double* x, int d,
                                       long long n_samples, uint64_t seed, int workers,
                                       recmax_estimate* primary, recmax_estimate* cross,
                                       int* has_cross);
recmax_status recmax_simple_record_limit_df(const recmax_model* m, const double* x,
                                            int d, long long n_samples, uint64_t seed,
                                            int workers, recmax_estimate* out);
/* RECMAX_ABSENT when the family has no closed form at x. */
recmax_status recmax_champion_survival_closed_form(const recmax_model* m,
                                                   const double* x, int d, double* out);
recmax_status recmax_simple_record_limit_df_closed_form(const recmax_model* m,
                                                        const double* x, int d,
                                                        double* out);

recmax_status recmax_champion_survival_empirical(const recmax_copula* c, const double* x,
                                                 int d, long long n, long long reps,
                                                 uint64_t seed, int workers,
                                                 recmax_estimate* out);
/* grid is n_points * d row-major; out_estimates receives n_points entries. */
recmax_status recmax_simple_record_limit_df_empirical(const recmax_copula* c,
                                                      const double* grid, int n_points,
                                                      int d, long long n, long long reps,
                                                      uint64_t seed, int workers,
                                                      recmax_estimate* out_estimates);

/* Composite reports returned as JSON objects (12 significant digits). */
recmax_status recmax_expected_records_growth_json(const recmax_copula* c, long long n,
                                                  long long reps, uint64_t seed,
                                                  int workers,
                                                  const long long* checkpoints,
                                                  int n_checkpoints, char** out_json);
recmax_status recmax_expected_n2_json(const recmax_copula* c, long long n_samples,
                                      uint64_t seed, int workers, long long cap,
                                      char** out_json);
recmax_status recmax_chi_bar_json(const recmax_copula* c, const double* u_grid,
                                  int n_points, long long n_samples, uint64_t seed,
                                  int workers, char** out_json);
recmax_status recmax_chi_bar_rows_json(const double* rows, long long n, int d,
                                       const double* u_grid, int n_points,
                                       char** out_json);
recmax_status recmax_second_record_df_json(const recmax_copula* c, const double* x,
                                           int d, long long n_samples, uint64_t seed,
                                           int workers, char** out_json);
recmax_status recmax_gap_law_check_json(const recmax_copula* c, int n_records,
                                        long long streams, uint64_t seed,
                                        char** out_json);
recmax_status recmax_monotonicity_check_json(const recmax_copula* c, int max_n,
                                             long long streams, uint64_t seed,
                                             char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RECMAX_RECMAX_H */
