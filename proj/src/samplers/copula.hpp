#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/rng.hpp"
#include "dnorm/dependence_model.hpp"
#include "samplers/eta_sampler.hpp"

namespace recmax {

enum class CopulaFamily {
  kProduct,
  kComonotone,
  kGumbelHougaard,  // exp(-(sum (-log u_i)^lambda)^(1/lambda))
  kGaussian,        // equicorrelated, closed-form df in d = 2 only
  kMaxStable,       // copula of the max-stable vector of a dependence model
};

// Sampling and (when available) closed-form df of the supported copulas.
// Every sample lies strictly inside the open unit cube.
class CopulaModel {
 public:
  static CopulaModel product(int d);
  static CopulaModel comonotone(int d);
  static CopulaModel gumbel_hougaard(double lambda, int d);
  static CopulaModel gaussian(double rho, int d);
  static CopulaModel max_stable(DependenceModel model);

  // Grammar: "product", "comonotone", "gumbel:<lambda>", "gaussian:<rho>",
  // "msc:<model descriptor>", optional ":d=<n>" suffix on all of them.
  static CopulaModel parse(std::string_view descriptor, int fallback_dim = 0);
  std::string descriptor() const;

  CopulaFamily family() const { return family_; }
  int dim() const { return d_; }
  double parameter() const { return param_; }

  void sample(Rng& rng, std::span<double> out) const;

  bool has_cdf() const;
  double cdf(std::span<const double> u) const;  // accepts the closed cube

  // The dependence model whose max-stable copula this is, when that
  // structure exists (product = independence, comonotone = comonotone,
  // gumbel = logistic, msc = its model); null for gaussian.
  const DependenceModel* dependence() const;

 private:
  CopulaModel(CopulaFamily f, double param, int d);

  CopulaFamily family_;
  double param_ = 0.0;
  int d_ = 0;
  std::optional<DependenceModel> model_;
  std::shared_ptr<const EtaSampler> eta_;
  std::vector<double> chol_;  // row-major lower triangle, gaussian only
};

}  // namespace recmax
