#include "dnorm/dependence_model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "core/kahan.hpp"

namespace recmax {

namespace {

constexpr int kMaxSubsetDim = 20;  // 2^d - 1 terms; refuse beyond this

double parse_double(std::string_view tok, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) {
    throw std::invalid_argument(std::string("descriptor: bad ") + what + " '" +
                                std::string(tok) + "'");
  }
  return v;
}

int parse_dim_token(std::string_view tok) {
  if (tok.size() < 3 || tok.substr(0, 2) != "d=") {
    throw std::invalid_argument("descriptor: expected d=<n>, got '" + std::string(tok) + "'");
  }
  int d = 0;
  const char* first = tok.data() + 2;
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, d);
  if (ec != std::errc() || p != last || d < 1) {
    throw std::invalid_argument("descriptor: bad dimension '" + std::string(tok) + "'");
  }
  return d;
}

std::string format_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// l_lambda norm over the coordinates of |x| selected by mask, scaled to
// avoid overflow for extreme inputs.
double logistic_subset_norm(std::span<const double> x, unsigned mask, double lambda) {
  double m = 0.0;
  for (unsigned b = mask; b != 0; b &= b - 1) {
    m = std::max(m, std::abs(x[std::countr_zero(b)]));
  }
  if (m == 0.0) return 0.0;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (unsigned b = mask; b != 0; b &= b - 1) {
    s += std::pow(std::abs(x[std::countr_zero(b)]) / m, lambda);
  }
  return m * std::pow(s, 1.0 / lambda);
}

// Dual of the Weibull family over a subset: (sum |x_i|^-alpha)^(-1/alpha),
// zero as soon as a selected coordinate vanishes.
double weibull_subset_dual(std::span<const double> x, unsigned mask, double alpha) {
  double mn = std::numeric_limits<double>::infinity();
  for (unsigned b = mask; b != 0; b &= b - 1) {
    mn = std::min(mn, std::abs(x[std::countr_zero(b)]));
  }
  if (mn == 0.0) return 0.0;
  if (std::isinf(mn)) return mn;
  double s = 0.0;
  for (unsigned b = mask; b != 0; b &= b - 1) {
    s += std::pow(mn / std::abs(x[std::countr_zero(b)]), alpha);
  }
  return mn * std::pow(s, -1.0 / alpha);
}

double sorted_bernoulli_norm(std::vector<double>& a, double beta) {
  // E max_i |x_i| Z_i with Z ~ iid Bern(beta)/beta: scan |x| in decreasing
  // order; the i-th largest is the max exactly when it is the first hit.
  std::sort(a.begin(), a.end(), std::greater<>());
  double w = 1.0;
  KahanSum s;
  for (double v : a) {
    s.add(v * w);
    w *= 1.0 - beta;
  }
  return s.value();
}

unsigned full_mask(int d) { return d >= 32 ? 0u : ((1u << d) - 1u); }

}  // namespace

DependenceModel::DependenceModel(Family f, double param, int d)
    : family_(f), param_(param), d_(d) {
  if (d < 1) throw std::invalid_argument("dependence model: dimension must be >= 1");
}

DependenceModel DependenceModel::logistic(double lambda, int d) {
  if (!(lambda > 1.0)) throw std::invalid_argument("logistic: lambda must exceed 1");
  DependenceModel m(Family::kLogistic, lambda, d);
  m.factor_ = 1.0 / std::tgamma(1.0 - 1.0 / lambda);
  return m;
}

DependenceModel DependenceModel::weibull_model(double alpha, int d) {
  if (!(alpha > 0.0)) throw std::invalid_argument("weibull: alpha must be positive");
  DependenceModel m(Family::kWeibullModel, alpha, d);
  m.factor_ = 1.0 / std::tgamma(1.0 + 1.0 / alpha);
  return m;
}

DependenceModel DependenceModel::bernoulli(double beta, int d) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("bernoulli: beta must lie in (0,1]");
  }
  return DependenceModel(Family::kBernoulli, beta, d);
}

DependenceModel DependenceModel::marshall_olkin(double gamma, int d) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("marshall-olkin: gamma must lie in (0,1)");
  }
  return DependenceModel(Family::kMarshallOlkin, gamma, d);
}

DependenceModel DependenceModel::independence(int d) {
  return DependenceModel(Family::kIndependence, 0.0, d);
}

DependenceModel DependenceModel::comonotone(int d) {
  return DependenceModel(Family::kComonotone, 0.0, d);
}

DependenceModel DependenceModel::custom(int d, GeneratorFn fn, std::optional<double> bound) {
  if (!fn) throw std::invalid_argument("custom model: sampler must be callable");
  if (bound && !(*bound > 0.0)) {
    throw std::invalid_argument("custom model: bound must be positive");
  }
  DependenceModel m(Family::kCustom, 0.0, d);
  m.custom_fn_ = std::make_shared<const GeneratorFn>(std::move(fn));
  m.custom_bound_ = bound;
  return m;
}

DependenceModel DependenceModel::parse(std::string_view desc, int fallback_dim) {
  std::vector<std::string_view> tok;
  std::size_t pos = 0;
  while (pos <= desc.size()) {
    const std::size_t next = desc.find(':', pos);
    if (next == std::string_view::npos) {
      tok.push_back(desc.substr(pos));
      break;
    }
    tok.push_back(desc.substr(pos, next - pos));
    pos = next + 1;
  }
  if (tok.empty() || tok[0].empty()) {
    throw std::invalid_argument("descriptor: empty model name");
  }

  int d = fallback_dim;
  if (tok.size() > 1 && tok.back().substr(0, 2) == "d=") {
    d = parse_dim_token(tok.back());
    tok.pop_back();
  }
  if (d < 1) {
    throw std::invalid_argument("descriptor: dimension missing (add :d=<n>) in '" +
                                std::string(desc) + "'");
  }

  const std::string_view name = tok[0];
  const auto want_param = [&](const char* what) -> double {
    if (tok.size() != 2) {
      throw std::invalid_argument("descriptor: '" + std::string(name) +
                                  "' takes exactly one parameter");
    }
    return parse_double(tok[1], what);
  };
  const auto want_bare = [&]() {
    if (tok.size() != 1) {
      throw std::invalid_argument("descriptor: '" + std::string(name) +
                                  "' takes no parameter");
    }
  };

  if (name == "logistic") return logistic(want_param("lambda"), d);
  if (name == "weibull") return weibull_model(want_param("alpha"), d);
  if (name == "bernoulli") return bernoulli(want_param("beta"), d);
  if (name == "mo") return marshall_olkin(want_param("gamma"), d);
  if (name == "indep") {
    want_bare();
    return independence(d);
  }
  if (name == "comonotone") {
    want_bare();
    return comonotone(d);
  }
  throw std::invalid_argument("descriptor: unknown model '" + std::string(name) + "'");
}

std::string DependenceModel::descriptor() const {
  const std::string dim = ":d=" + std::to_string(d_);
  switch (family_) {
    case Family::kLogistic: return "logistic:" + format_param(param_) + dim;
    case Family::kWeibullModel: return "weibull:" + format_param(param_) + dim;
    case Family::kBernoulli: return "bernoulli:" + format_param(param_) + dim;
    case Family::kMarshallOlkin: return "mo:" + format_param(param_) + dim;
    case Family::kIndependence: return "indep" + dim;
    case Family::kComonotone: return "comonotone" + dim;
    case Family::kCustom: return "custom" + dim;  // display only, not parsable
  }
  return "?";
}

std::optional<double> DependenceModel::generator_bound() const {
  switch (family_) {
    case Family::kBernoulli: return 1.0 / param_;
    case Family::kMarshallOlkin: return static_cast<double>(d_);
    case Family::kIndependence: return static_cast<double>(d_);
    case Family::kComonotone: return 1.0;
    case Family::kCustom: return custom_bound_;
    default: return std::nullopt;  // logistic / weibull generators are unbounded
  }
}

void DependenceModel::check_dim(std::size_t n) const {
  if (static_cast<int>(n) != d_) {
    throw std::invalid_argument("vector length " + std::to_string(n) +
                                " does not match model dimension " + std::to_string(d_));
  }
}

double DependenceModel::norm(std::span<const double> x) const {
  check_dim(x.size());
  switch (family_) {
    case Family::kLogistic: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      if (m == 0.0 || std::isinf(m)) return m;
      double s = 0.0;
      for (double v : x) s += std::pow(std::abs(v) / m, param_);
      return m * std::pow(s, 1.0 / param_);
    }
    case Family::kIndependence: {
      KahanSum s;
      for (double v : x) s.add(std::abs(v));
      return s.value();
    }
    case Family::kComonotone: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      return m;
    }
    case Family::kBernoulli: {
      std::vector<double> a(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
      return sorted_bernoulli_norm(a, param_);
    }
    case Family::kMarshallOlkin: {
      double m = 0.0;
      KahanSum s;
      for (double v : x) {
        m = std::max(m, std::abs(v));
        s.add(std::abs(v));
      }
      return param_ * m + (1.0 - param_) * s.value();
    }
    case Family::kWeibullModel:
      return norm_via_inclusion_exclusion(*this, x);
    case Family::kCustom:
      throw std::domain_error(
          "custom generator has no closed-form norm; use the Monte Carlo evaluator");
  }
  return 0.0;
}

double DependenceModel::dual(std::span<const double> x) const {
  check_dim(x.size());
  double mn = std::numeric_limits<double>::infinity();
  for (double v : x) mn = std::min(mn, std::abs(v));
  switch (family_) {
    case Family::kComonotone:
      return mn;
    case Family::kIndependence:
      return d_ == 1 ? mn : 0.0;
    case Family::kBernoulli:
      return std::pow(param_, d_ - 1) * mn;
    case Family::kMarshallOlkin:
      return d_ == 1 ? mn : param_ * mn;
    case Family::kWeibullModel: {
      if (mn == 0.0 || std::isinf(mn)) return mn;
      double s = 0.0;
      for (double v : x) s += std::pow(mn / std::abs(v), param_);
      return mn * std::pow(s, -1.0 / param_);
    }
    case Family::kLogistic:
      return dual_via_inclusion_exclusion(*this, x);
    case Family::kCustom:
      throw std::domain_error(
          "custom generator has no closed-form dual; use the Monte Carlo evaluator");
  }
  return 0.0;
}

DependenceModel DependenceModel::margin(std::span<const int> coords) const {
  if (coords.empty()) throw std::invalid_argument("margin: coordinate set must be nonempty");
  std::vector<int> c(coords.begin(), coords.end());
  std::sort(c.begin(), c.end());
  if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
    throw std::invalid_argument("margin: coordinates must be distinct");
  }
  if (c.front() < 0 || c.back() >= d_) {
    throw std::invalid_argument("margin: coordinate out of range");
  }
  const int k = static_cast<int>(c.size());
  switch (family_) {
    case Family::kLogistic: return logistic(param_, k);
    case Family::kWeibullModel: return weibull_model(param_, k);
    case Family::kBernoulli: return bernoulli(param_, k);
    case Family::kMarshallOlkin: return marshall_olkin(param_, k);
    case Family::kIndependence: return independence(k);
    case Family::kComonotone: return comonotone(k);
    case Family::kCustom: {
      auto base = custom_fn_;
      const int full_d = d_;
      GeneratorFn fn = [base, full_d, c](Rng& rng, std::span<double> out) {
        std::vector<double> buf(full_d);
        (*base)(rng, buf);
        for (std::size_t j = 0; j < c.size(); ++j) out[j] = buf[c[j]];
      };
      return custom(k, std::move(fn), custom_bound_);
    }
  }
  throw std::logic_error("margin: unreachable");
}

void DependenceModel::sample_generator(Rng& rng, std::span<double> out) const {
  check_dim(out.size());
  switch (family_) {
    case Family::kLogistic: {
      // Frechet(lambda) scaled to unit mean.
      const double inv = 1.0 / param_;
      for (auto& v : out) v = std::pow(rng.exponential(), -inv) * factor_;
      return;
    }
    case Family::kWeibullModel: {
      const double inv = 1.0 / param_;
      for (auto& v : out) v = std::pow(rng.exponential(), inv) * factor_;
      return;
    }
    case Family::kBernoulli: {
      const double inv = 1.0 / param_;
      for (auto& v : out) v = rng.uniform_open() < param_ ? inv : 0.0;
      return;
    }
    case Family::kMarshallOlkin: {
      if (rng.uniform_open() < param_) {
        for (auto& v : out) v = 1.0;
      } else {
        for (auto& v : out) v = 0.0;
        out[rng.below(d_)] = static_cast<double>(d_);
      }
      return;
    }
    case Family::kIndependence: {
      for (auto& v : out) v = 0.0;
      out[rng.below(d_)] = static_cast<double>(d_);
      return;
    }
    case Family::kComonotone: {
      for (auto& v : out) v = 1.0;
      return;
    }
    case Family::kCustom: {
      (*custom_fn_)(rng, out);
      for (double v : out) {
        if (!(v >= 0.0)) {
          throw std::domain_error("custom generator produced a negative component");
        }
        if (custom_bound_ && v > *custom_bound_ * (1.0 + 1e-12)) {
          throw std::domain_error("custom generator exceeded its declared bound");
        }
      }
      return;
    }
  }
}

std::optional<double> DependenceModel::concurrence_closed_form() const {
  if (d_ == 1) return 1.0;  // a single coordinate always has a champion
  switch (family_) {
    case Family::kLogistic: {
      double p = 1.0;
      for (int i = 1; i < d_; ++i) p *= 1.0 - 1.0 / (param_ * i);
      return p;
    }
    case Family::kComonotone:
      return 1.0;
    case Family::kIndependence:
      return 0.0;
    case Family::kMarshallOlkin:
      return param_ / (param_ + d_ * (1.0 - param_));
    case Family::kBernoulli:
      return std::pow(param_, d_) / (1.0 - std::pow(1.0 - param_, d_));
    default:
      return std::nullopt;
  }
}

std::optional<double> DependenceModel::expected_norm_closed_form() const {
  if (d_ == 1) return 1.0;
  switch (family_) {
    case Family::kLogistic: {
      double p = 1.0;
      for (int i = 1; i < d_; ++i) p *= 1.0 + 1.0 / (param_ * i);
      return p;
    }
    case Family::kComonotone:
      return 1.0;
    case Family::kIndependence:
      return static_cast<double>(d_);
    default:
      return std::nullopt;
  }
}

namespace {

// Margin evaluations by bitmask, avoiding the cost of building sub-models
// inside the 2^d loops.
double subset_norm(const DependenceModel& m, std::span<const double> x, unsigned mask) {
  switch (m.family()) {
    case Family::kLogistic:
      return logistic_subset_norm(x, mask, m.parameter());
    case Family::kIndependence: {
      KahanSum s;
      for (unsigned b = mask; b != 0; b &= b - 1) s.add(std::abs(x[std::countr_zero(b)]));
      return s.value();
    }
    case Family::kComonotone: {
      double mx = 0.0;
      for (unsigned b = mask; b != 0; b &= b - 1) {
        mx = std::max(mx, std::abs(x[std::countr_zero(b)]));
      }
      return mx;
    }
    case Family::kBernoulli: {
      std::vector<double> a;
      a.reserve(std::popcount(mask));
      for (unsigned b = mask; b != 0; b &= b - 1) a.push_back(std::abs(x[std::countr_zero(b)]));
      return sorted_bernoulli_norm(a, m.parameter());
    }
    case Family::kMarshallOlkin: {
      double mx = 0.0;
      KahanSum s;
      for (unsigned b = mask; b != 0; b &= b - 1) {
        const double v = std::abs(x[std::countr_zero(b)]);
        mx = std::max(mx, v);
        s.add(v);
      }
      return m.parameter() * mx + (1.0 - m.parameter()) * s.value();
    }
    case Family::kWeibullModel: {
      // margin norm of the Weibull family: inclusion-exclusion within the mask
      KahanSum s;
      for (unsigned sub = mask; sub != 0; sub = (sub - 1) & mask) {
        const double term = weibull_subset_dual(x, sub, m.parameter());
        s.add(std::popcount(sub) % 2 == 1 ? term : -term);
      }
      return s.value();
    }
    case Family::kCustom:
      throw std::domain_error("custom generator has no closed-form margins");
  }
  return 0.0;
}

double subset_dual(const DependenceModel& m, std::span<const double> x, unsigned mask) {
  const int k = std::popcount(mask);
  double mn = std::numeric_limits<double>::infinity();
  for (unsigned b = mask; b != 0; b &= b - 1) {
    mn = std::min(mn, std::abs(x[std::countr_zero(b)]));
  }
  switch (m.family()) {
    case Family::kComonotone:
      return mn;
    case Family::kIndependence:
      return k == 1 ? mn : 0.0;
    case Family::kBernoulli:
      return std::pow(m.parameter(), k - 1) * mn;
    case Family::kMarshallOlkin:
      return k == 1 ? mn : m.parameter() * mn;
    case Family::kWeibullModel:
      return weibull_subset_dual(x, mask, m.parameter());
    case Family::kLogistic: {
      KahanSum s;
      for (unsigned sub = mask; sub != 0; sub = (sub - 1) & mask) {
        const double term = logistic_subset_norm(x, sub, m.parameter());
        s.add(std::popcount(sub) % 2 == 1 ? term : -term);
      }
      return s.value();
    }
    case Family::kCustom:
      throw std::domain_error("custom generator has no closed-form margins");
  }
  return 0.0;
}

void check_subset_dim(const DependenceModel& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.dim()) {
    throw std::invalid_argument("vector length does not match model dimension");
  }
  if (m.dim() > kMaxSubsetDim) {
    throw std::domain_error("inclusion-exclusion over subsets is limited to d <= 20");
  }
}

}  // namespace

double dual_via_inclusion_exclusion(const DependenceModel& m, std::span<const double> x) {
  check_subset_dim(m, x);
  const unsigned full = full_mask(m.dim());
  KahanSum s;
  for (unsigned mask = 1; mask <= full; ++mask) {
    const double term = subset_norm(m, x, mask);
    s.add(std::popcount(mask) % 2 == 1 ? term : -term);
  }
  return s.value();
}

double norm_via_inclusion_exclusion(const DependenceModel& m, std::span<const double> x) {
  check_subset_dim(m, x);
  const unsigned full = full_mask(m.dim());
  KahanSum s;
  for (unsigned mask = 1; mask <= full; ++mask) {
    const double term = subset_dual(m, x, mask);
    s.add(std::popcount(mask) % 2 == 1 ? term : -term);
  }
  return s.value();
}

}  // namespace recmax
