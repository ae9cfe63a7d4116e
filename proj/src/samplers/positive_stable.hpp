#pragma once

#include "core/rng.hpp"

namespace recmax {

// One-sided alpha-stable S, 0 < alpha < 1, normalized so that
// E exp(-t S) = exp(-t^alpha).  Kanter's representation:
//   S = (A(V)/W)^((1-alpha)/alpha),  V ~ U(0,pi),  W ~ Exp(1),
//   A(v) = sin(alpha v)^(alpha/(1-alpha)) sin((1-alpha)v) / sin(v)^(1/(1-alpha)),
// evaluated in log space so extreme angles stay finite.
double sample_positive_stable(double alpha, Rng& rng);

}  // namespace recmax
