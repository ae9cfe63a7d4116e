#include "core/special.hpp"

#include <cmath>
#include <stdexcept>

namespace recmax {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2Pi = 2.50662827463100050242;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0,1)");
  }
  // Abramowitz-Stegun 26.2.23 start (|err| < 4.5e-4), then Newton on the
  // erfc-based cdf; three steps reach machine precision everywhere except
  // the last few ulp of the tails.
  const double q = p < 0.5 ? p : 1.0 - p;
  const double t = std::sqrt(-2.0 * std::log(q));
  double x = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                     (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
  if (p < 0.5) x = -x;
  for (int i = 0; i < 3; ++i) {
    const double err = norm_cdf(x) - p;
    const double d = norm_pdf(x);
    if (d <= 0.0) break;
    x -= err / d;
  }
  return x;
}

GaussLegendre make_gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("make_gauss_legendre: n must be >= 1");
  GaussLegendre g;
  g.x.assign(n, 0.0);
  g.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    g.w[n - 1 - i] = g.w[i];
  }
  return g;
}

const GaussLegendre& gauss_legendre(int n) {
  static const GaussLegendre g6 = make_gauss_legendre(6);
  static const GaussLegendre g12 = make_gauss_legendre(12);
  static const GaussLegendre g20 = make_gauss_legendre(20);
  switch (n) {
    case 6: return g6;
    case 12: return g12;
    case 20: return g20;
    default: throw std::invalid_argument("gauss_legendre: cached sizes are 6, 12, 20");
  }
}

namespace {

// P(X > dh, Y > dk) for standard bivariate normal, correlation r.
// Genz (2004): single Gauss-Legendre pass on asin(r) for moderate r,
// tail-difference expansion plus quadrature for |r| close to 1.
double bvn_upper(double dh, double dk, double r) {
  const int rule = std::abs(r) < 0.3 ? 6 : (std::abs(r) < 0.75 ? 12 : 20);
  const GaussLegendre& g = gauss_legendre(rule);

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    if (std::abs(r) > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r) / 2.0;
      for (int i = 0; i < rule; ++i) {
        const double sn = std::sin(asr * (1.0 + g.x[i]));
        bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
      bvn = bvn * asr / (2.0 * kPi);
    }
    return bvn + norm_cdf(-h) * norm_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as0 = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as0);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as0 + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as0) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as0 * as0 / 5.0);
    }
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      const double sp = kSqrt2Pi * norm_cdf(-b / a);
      bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < rule; ++i) {
      const double xi = a * (1.0 + g.x[i]);
      const double xs = xi * xi;
      const double rs = std::sqrt(1.0 - xs);
      asr = -(bs / xs + hk) / 2.0;
      if (asr > -100.0) {
        bvn += a * g.w[i] * std::exp(asr) *
               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                (1.0 + c * xs * (1.0 + d * xs)));
      }
    }
    bvn = -bvn / (2.0 * kPi);
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
  }
  return bvn;
}

}  // namespace

double bvn_cdf(double a, double b, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::domain_error("bvn_cdf: rho must lie in (-1,1)");
  }
  if (std::isnan(a) || std::isnan(b)) {
    throw std::domain_error("bvn_cdf: NaN argument");
  }
  const double p = bvn_upper(-a, -b, rho);
  return std::max(0.0, std::min(1.0, p));
}

}  // namespace recmax
