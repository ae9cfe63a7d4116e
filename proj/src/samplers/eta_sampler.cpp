#include "samplers/eta_sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "samplers/positive_stable.hpp"

namespace recmax {

EtaSampler::EtaSampler(DependenceModel model)
    : model_(std::move(model)), thinning_model_(model_) {
  switch (model_.family()) {
    case Family::kComonotone:
      mode_ = Mode::kComonotone;
      method_ = "exact:comonotone";
      return;
    case Family::kIndependence:
      mode_ = Mode::kIndependence;
      method_ = "exact:independence";
      return;
    case Family::kLogistic:
      mode_ = Mode::kLogistic;
      method_ = "exact:positive-stable-mixture";
      return;
    case Family::kBernoulli:
    case Family::kMarshallOlkin:
      mode_ = Mode::kThinning;
      bound_ = *model_.generator_bound();
      method_ = "exact:thinning";
      return;
    case Family::kCustom: {
      const auto bound = model_.generator_bound();
      if (!bound) {
        throw std::domain_error(
            "eta sampling from an unbounded custom generator requires a declared bound");
      }
      mode_ = Mode::kThinning;
      bound_ = *bound;
      method_ = "exact:thinning";
      return;
    }
    case Family::kWeibullModel: {
      // Clamp the unbounded generator at its (1 - 1e-6) quantile; the
      // thinning run is then exact for the clamped model and the df of the
      // result differs from the target by at most d * 1e-6.
      constexpr double kTail = 1e-6;
      const double alpha = model_.parameter();
      const double scale = 1.0 / std::tgamma(1.0 + 1.0 / alpha);
      const double cq = std::pow(-std::log(kTail), 1.0 / alpha) * scale;
      const DependenceModel base = model_;
      GeneratorFn fn = [base, cq](Rng& rng, std::span<double> out) {
        base.sample_generator(rng, out);
        for (auto& v : out) v = std::min(v, cq);
      };
      thinning_model_ = DependenceModel::custom(model_.dim(), std::move(fn), cq);
      mode_ = Mode::kThinning;
      bound_ = cq;
      method_ = "thinning:truncated(1e-6)";
      bias_bound_ = model_.dim() * kTail;
      return;
    }
  }
  throw std::logic_error("EtaSampler: unreachable");
}

std::size_t EtaSampler::sample(Rng& rng, std::span<double> out) const {
  if (static_cast<int>(out.size()) != model_.dim()) {
    throw std::invalid_argument("EtaSampler::sample: output size mismatch");
  }
  switch (mode_) {
    case Mode::kComonotone: {
      const double e = rng.exponential();
      for (auto& v : out) v = -e;
      return 0;
    }
    case Mode::kIndependence: {
      for (auto& v : out) v = -rng.exponential();
      return 0;
    }
    case Mode::kLogistic: {
      const double lambda = model_.parameter();
      const double s = sample_positive_stable(1.0 / lambda, rng);
      const double inv = 1.0 / lambda;
      for (auto& v : out) v = -std::pow(rng.exponential() / s, inv);
      return 0;
    }
    case Mode::kThinning:
      return sample_thinned(rng, out);
  }
  return 0;
}

std::size_t EtaSampler::sample_thinned(Rng& rng, std::span<double> out) const {
  const int d = model_.dim();
  thread_local std::vector<double> z;
  z.resize(d);

  for (auto& v : out) v = 0.0;  // running sup of zeta_k * Z^(k)
  double gamma = 0.0;
  std::size_t points = 0;
  while (true) {
    gamma += rng.exponential();
    if (++points > kMaxPoints) {
      throw std::runtime_error("thinning sampler: point budget exhausted");
    }
    thinning_model_.sample_generator(rng, z);
    const double zeta = 1.0 / gamma;
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const double cand = zeta * z[i];
      if (cand > out[i]) out[i] = cand;
      mn = std::min(mn, out[i]);
    }
    // Later arrivals have zeta' < zeta, so once zeta * c cannot reach the
    // smallest accumulated coordinate no future point can change anything.
    if (mn > 0.0 && zeta * bound_ <= mn) break;
  }
  for (auto& v : out) v = -1.0 / v;
  return points;
}

}  // namespace recmax
