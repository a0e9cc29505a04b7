#include "hyperpark/numeric.hpp"

namespace hyperpark {

SampleMoments sample_moments(std::span<const double> xs) {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;

  CompensatedSum total;
  for (double x : xs) total.add(x);
  const double n = static_cast<double>(xs.size());
  m.mean = total.value() / n;

  if (xs.size() < 2) return m;
  CompensatedSum m2_sum, m4_sum;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2_sum.add(d2);
    m4_sum.add(d2 * d2);
  }
  const double m2 = m2_sum.value() / n;
  const double m4 = m4_sum.value() / n;
  m.variance = m2_sum.value() / (n - 1.0);
  m.se_mean = std::sqrt(m.variance / n);
  // Var(s^2) ~ (m4 - m2^2 (n-3)/(n-1)) / n for iid samples.
  const double var_s2 = (m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n;
  m.se_variance = var_s2 > 0.0 ? std::sqrt(var_s2) : 0.0;
  return m;
}

} // namespace hyperpark
