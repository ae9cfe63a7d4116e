#pragma once

#include <cmath>

namespace recmax {

// Kahan-Babuska (Neumaier) compensated accumulator.  Used wherever terms
// alternate in sign (inclusion-exclusion sums) or many samples are reduced,
// so that the 2^d cancellation in high dimension stays near machine epsilon.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  void merge(const KahanSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace recmax
