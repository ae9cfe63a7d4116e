#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/rng.hpp"

namespace recmax {

enum class Family {
  kLogistic,       // (sum |x_i|^lambda)^(1/lambda), lambda > 1
  kWeibullModel,   // dual (sum |x_i|^-alpha)^(-1/alpha), alpha > 0
  kBernoulli,      // generator Bern(beta)/beta, beta in (0,1]
  kMarshallOlkin,  // gamma * max + (1-gamma) * sum, gamma in (0,1)
  kIndependence,   // sum norm
  kComonotone,     // max norm
  kCustom,         // user generator, Monte Carlo evaluation only
};

// Sampler for a user-supplied generator: fills out (size d) with one draw
// of a nonnegative vector whose components all have unit mean.
using GeneratorFn = std::function<void(Rng&, std::span<double>)>;

// A dependence model is the pair (norm, generator): the norm is
// E max_i |x_i| Z_i for a nonnegative random vector Z with unit component
// means, and the dual function is E min_i |x_i| Z_i.  The named families
// carry closed forms for both; a custom model only carries the sampler.
class DependenceModel {
 public:
  static DependenceModel logistic(double lambda, int d);
  static DependenceModel weibull_model(double alpha, int d);
  static DependenceModel bernoulli(double beta, int d);
  static DependenceModel marshall_olkin(double gamma, int d);
  static DependenceModel independence(int d);
  static DependenceModel comonotone(int d);
  static DependenceModel custom(int d, GeneratorFn fn, std::optional<double> bound);

  // Descriptor grammar: "logistic:<lambda>", "weibull:<alpha>",
  // "bernoulli:<beta>", "mo:<gamma>", "indep", "comonotone", each with an
  // optional ":d=<n>" suffix.  Without the suffix the dimension falls back
  // to fallback_dim (0 means "must be in the descriptor").
  static DependenceModel parse(std::string_view descriptor, int fallback_dim = 0);
  std::string descriptor() const;  // canonical, always carries :d=

  Family family() const { return family_; }
  int dim() const { return d_; }
  double parameter() const { return param_; }
  bool has_closed_forms() const { return family_ != Family::kCustom; }

  // Essential sup of max_i Z_i when the generator is bounded.
  std::optional<double> generator_bound() const;

  // E max_i |x_i| Z_i.  Closed form per family; the Weibull family routes
  // through inclusion-exclusion over its dual (d <= 20).  Throws for
  // custom models (use the Monte Carlo evaluator in estimators/).
  double norm(std::span<const double> x) const;

  // E min_i |x_i| Z_i.  Closed form per family; the logistic family routes
  // through inclusion-exclusion over its norm (d <= 20).
  double dual(std::span<const double> x) const;

  // Sub-model on a coordinate subset; named families are margin-closed
  // with the same parameter.
  DependenceModel margin(std::span<const int> coords) const;

  void sample_generator(Rng& rng, std::span<double> out) const;

  // Probability that a sequence attracted to this model keeps producing
  // champions: E min_i Z'_i for the generator of the corresponding
  // max-stable vector, available in closed form for some families.
  std::optional<double> concurrence_closed_form() const;

  // E ||eta||_D for the standard max-stable vector eta of this model.
  std::optional<double> expected_norm_closed_form() const;

 private:
  DependenceModel(Family f, double param, int d);

  void check_dim(std::size_t n) const;

  Family family_;
  double param_ = 0.0;
  int d_ = 0;
  double factor_ = 1.0;  // 1/Gamma(1 -/+ 1/param) scaling for logistic/weibull
  std::shared_ptr<const GeneratorFn> custom_fn_;
  std::optional<double> custom_bound_;
};

// Inclusion-exclusion identities tying the two evaluations together:
//   min a = sum over nonempty T of (-1)^(|T|+1) max_{i in T} a_i
// applied under the expectation.  Both need all 2^d - 1 margin terms and
// are restricted to d <= 20; sums are compensated.
double dual_via_inclusion_exclusion(const DependenceModel& m, std::span<const double> x);
double norm_via_inclusion_exclusion(const DependenceModel& m, std::span<const double> x);

}  // namespace recmax
