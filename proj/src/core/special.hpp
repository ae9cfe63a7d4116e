#pragma once

#include <vector>

namespace recmax {

double norm_pdf(double x);
double norm_cdf(double x);

// Inverse of norm_cdf on (0,1).  Rational first guess refined by Newton
// steps on erfc, accurate to a few ulp away from the extreme tails.
double norm_quantile(double p);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1].
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};

GaussLegendre make_gauss_legendre(int n);
const GaussLegendre& gauss_legendre(int n);  // cached for n in {6,12,20}

// P(X <= a, Y <= b) for a standard bivariate normal pair with correlation
// rho.  Genz's split quadrature; absolute accuracy well below 1e-10 over
// the whole parameter range (see tests for the independent oracle).
double bvn_cdf(double a, double b, double rho);

}  // namespace recmax
