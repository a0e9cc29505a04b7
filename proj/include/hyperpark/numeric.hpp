#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hyperpark {

/// Neumaier-compensated accumulator; order-stable to ~1 ulp for the sum
/// magnitudes this project sees.
class CompensatedSum {
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
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// Sample moments needed by the verification layer: mean, unbiased
/// variance, and the standard errors of both (the latter via the fourth
/// central moment).
struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
};

SampleMoments sample_moments(std::span<const double> xs);

} // namespace hyperpark
