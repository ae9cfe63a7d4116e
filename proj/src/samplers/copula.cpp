#include "samplers/copula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "core/special.hpp"

namespace recmax {

namespace {

// Largest double below 1; keeps samples strictly inside the open cube.
constexpr double kOpenUpper = 0x1.fffffffffffffp-1;
constexpr double kOpenLower = std::numeric_limits<double>::min();

double to_open_unit(double u) {
  return std::min(std::max(u, kOpenLower), kOpenUpper);
}

std::string format_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

CopulaModel::CopulaModel(CopulaFamily f, double param, int d)
    : family_(f), param_(param), d_(d) {
  if (d < 1) throw std::invalid_argument("copula: dimension must be >= 1");
}

CopulaModel CopulaModel::product(int d) {
  CopulaModel c(CopulaFamily::kProduct, 0.0, d);
  c.model_ = DependenceModel::independence(d);
  return c;
}

CopulaModel CopulaModel::comonotone(int d) {
  CopulaModel c(CopulaFamily::kComonotone, 0.0, d);
  c.model_ = DependenceModel::comonotone(d);
  return c;
}

CopulaModel CopulaModel::gumbel_hougaard(double lambda, int d) {
  if (!(lambda > 1.0)) throw std::invalid_argument("gumbel: lambda must exceed 1");
  CopulaModel c(CopulaFamily::kGumbelHougaard, lambda, d);
  c.model_ = DependenceModel::logistic(lambda, d);
  c.eta_ = std::make_shared<const EtaSampler>(*c.model_);
  return c;
}

CopulaModel CopulaModel::gaussian(double rho, int d) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::invalid_argument("gaussian: rho must lie in (-1,1)");
  }
  CopulaModel c(CopulaFamily::kGaussian, rho, d);
  // Cholesky of the equicorrelation matrix; fails for rho < -1/(d-1).
  std::vector<double> a(static_cast<std::size_t>(d) * d, rho);
  for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i) * d + i] = 1.0;
  std::vector<double> l(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<std::size_t>(i) * d + j];
      for (int k = 0; k < j; ++k) {
        s -= l[static_cast<std::size_t>(i) * d + k] * l[static_cast<std::size_t>(j) * d + k];
      }
      if (i == j) {
        if (!(s > 0.0)) {
          throw std::invalid_argument(
              "gaussian: equicorrelation matrix is not positive definite at this (rho, d)");
        }
        l[static_cast<std::size_t>(i) * d + j] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(i) * d + j] = s / l[static_cast<std::size_t>(j) * d + j];
      }
    }
  }
  c.chol_ = std::move(l);
  return c;
}

CopulaModel CopulaModel::max_stable(DependenceModel model) {
  CopulaModel c(CopulaFamily::kMaxStable, 0.0, model.dim());
  c.eta_ = std::make_shared<const EtaSampler>(model);
  c.model_ = std::move(model);
  return c;
}

CopulaModel CopulaModel::parse(std::string_view desc, int fallback_dim) {
  // Peel one trailing ":d=<n>" if present, then dispatch on the head token.
  int d = fallback_dim;
  std::string_view body = desc;
  const std::size_t tail = desc.rfind(":d=");
  if (tail != std::string_view::npos && desc.find(':', tail + 1) == std::string_view::npos) {
    int v = 0;
    const char* first = desc.data() + tail + 3;
    const char* last = desc.data() + desc.size();
    char* endp = nullptr;
    v = static_cast<int>(std::strtol(first, &endp, 10));
    if (endp != last || v < 1) {
      throw std::invalid_argument("copula descriptor: bad dimension in '" + std::string(desc) +
                                  "'");
    }
    d = v;
    body = desc.substr(0, tail);
  }
  if (d < 1) {
    throw std::invalid_argument("copula descriptor: dimension missing (add :d=<n>) in '" +
                                std::string(desc) + "'");
  }

  const std::size_t colon = body.find(':');
  const std::string_view name = body.substr(0, colon);
  const std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : body.substr(colon + 1);

  const auto want_param = [&](const char* what) -> double {
    if (rest.empty()) {
      throw std::invalid_argument(std::string("copula descriptor: missing ") + what);
    }
    char* endp = nullptr;
    const std::string tmp(rest);
    const double v = std::strtod(tmp.c_str(), &endp);
    if (endp != tmp.c_str() + tmp.size()) {
      throw std::invalid_argument(std::string("copula descriptor: bad ") + what + " '" + tmp +
                                  "'");
    }
    return v;
  };

  if (name == "product") {
    if (!rest.empty()) throw std::invalid_argument("copula descriptor: 'product' takes no parameter");
    return product(d);
  }
  if (name == "comonotone") {
    if (!rest.empty()) {
      throw std::invalid_argument("copula descriptor: 'comonotone' takes no parameter");
    }
    return comonotone(d);
  }
  if (name == "gumbel") return gumbel_hougaard(want_param("lambda"), d);
  if (name == "gaussian") return gaussian(want_param("rho"), d);
  if (name == "msc") {
    if (rest.empty()) {
      throw std::invalid_argument("copula descriptor: 'msc' needs a model descriptor");
    }
    return max_stable(DependenceModel::parse(rest, d));
  }
  throw std::invalid_argument("copula descriptor: unknown family '" + std::string(name) + "'");
}

std::string CopulaModel::descriptor() const {
  const std::string dim = ":d=" + std::to_string(d_);
  switch (family_) {
    case CopulaFamily::kProduct: return "product" + dim;
    case CopulaFamily::kComonotone: return "comonotone" + dim;
    case CopulaFamily::kGumbelHougaard: return "gumbel:" + format_param(param_) + dim;
    case CopulaFamily::kGaussian: return "gaussian:" + format_param(param_) + dim;
    case CopulaFamily::kMaxStable: return "msc:" + model_->descriptor();
  }
  return "?";
}

void CopulaModel::sample(Rng& rng, std::span<double> out) const {
  if (static_cast<int>(out.size()) != d_) {
    throw std::invalid_argument("CopulaModel::sample: output size mismatch");
  }
  switch (family_) {
    case CopulaFamily::kProduct:
      for (auto& v : out) v = rng.uniform_open();
      return;
    case CopulaFamily::kComonotone: {
      const double u = rng.uniform_open();
      for (auto& v : out) v = u;
      return;
    }
    case CopulaFamily::kGumbelHougaard:
    case CopulaFamily::kMaxStable: {
      eta_->sample(rng, out);
      for (auto& v : out) v = to_open_unit(std::exp(v));
      return;
    }
    case CopulaFamily::kGaussian: {
      thread_local std::vector<double> z;
      z.resize(d_);
      for (auto& v : z) v = rng.normal();
      for (int i = d_ - 1; i >= 0; --i) {
        double s = 0.0;
        for (int k = 0; k <= i; ++k) s += chol_[static_cast<std::size_t>(i) * d_ + k] * z[k];
        out[i] = to_open_unit(norm_cdf(s));
      }
      return;
    }
  }
}

bool CopulaModel::has_cdf() const {
  return family_ != CopulaFamily::kGaussian || d_ <= 2;
}

double CopulaModel::cdf(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != d_) {
    throw std::invalid_argument("CopulaModel::cdf: argument size mismatch");
  }
  for (double v : u) {
    if (std::isnan(v)) throw std::invalid_argument("CopulaModel::cdf: NaN argument");
    if (v <= 0.0) return 0.0;
  }
  switch (family_) {
    case CopulaFamily::kProduct: {
      double p = 1.0;
      for (double v : u) p *= std::min(v, 1.0);
      return p;
    }
    case CopulaFamily::kComonotone: {
      double mn = 1.0;
      for (double v : u) mn = std::min(mn, v);
      return mn;
    }
    case CopulaFamily::kGumbelHougaard:
    case CopulaFamily::kMaxStable: {
      thread_local std::vector<double> lg;
      lg.resize(d_);
      for (int i = 0; i < d_; ++i) lg[i] = std::log(std::min(u[i], 1.0));
      return std::exp(-model_->norm(lg));
    }
    case CopulaFamily::kGaussian: {
      if (d_ == 1) return std::min(u[0], 1.0);
      if (d_ != 2) {
        throw std::domain_error("gaussian copula df is implemented for d <= 2 only");
      }
      if (u[0] >= 1.0) return std::min(u[1], 1.0);
      if (u[1] >= 1.0) return std::min(u[0], 1.0);
      return bvn_cdf(norm_quantile(u[0]), norm_quantile(u[1]), param_);
    }
  }
  return 0.0;
}

const DependenceModel* CopulaModel::dependence() const {
  return model_ ? &*model_ : nullptr;
}

}  // namespace recmax
