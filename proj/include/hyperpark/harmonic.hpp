#pragma once

#include <complex>
#include <vector>

#include "hyperpark/config.hpp"

namespace hyperpark {

/// Numerical failure with a quantified shortfall (quadrature that did not
/// reach its requested tolerance, and similar).
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

enum class LengthKind { Fixed, ExponentialRate };

/// An explicit finite search path: segment i carries a pop-up intensity
/// and either a fixed length or the rate of its exponentially distributed
/// length. A path is homogeneous in its length kind.
struct SegmentPath {
  LengthKind kind = LengthKind::Fixed;
  std::vector<double> intensities; // lambda_i >= 0
  std::vector<double> sizes;       // lengths (Fixed) or rates (ExponentialRate), > 0

  static SegmentPath fixed(std::vector<double> intensities, std::vector<double> lengths);
  static SegmentPath exponential(std::vector<double> intensities, std::vector<double> rates);

  std::size_t segments() const { return intensities.size(); }
  void validate() const;
};

/// Value of a truncated level sum together with a certified bound on the
/// absolute tail that was dropped.
struct HarmonicEval {
  double value = 0.0;
  double truncation_bound = 0.0;
  int terms_used = 0;
};

/// Expected driven distance on a fixed-length path:
///   sum_i (1 - e^{-l_i s_i})/l_i * prod_{j<i} e^{-l_j s_j},
/// with the l -> 0 limit (the bare segment length) taken per term. If no
/// slot appears anywhere the car stops at the end of the path, so the
/// all-zero-intensity value is the total path length.
double mean_distance_fixed_path(const SegmentPath& path);

/// Same path mean after integrating each length against its exponential
/// law: sum_i (1/a_i)/(1+l_i/a_i) * prod_{j<i} 1/(1+l_j/a_j).
double mean_distance_exponential(const SegmentPath& path);

/// Second moment of the driven distance on a fixed-length path.
double second_moment_fixed_path(const SegmentPath& path);

/// Second moment after integrating over exponential segment lengths.
/// Exact, including the length cross terms:
///   2 sum_i prod_{j<i} a_j * b_i * sum_{m<=i} b_m,
/// with a_j = (1+l_j/r_j)^{-1} and b_j = (1/r_j) a_j.
double second_moment_exponential(const SegmentPath& path);

/// E[e^{-s D}] for a fixed-length path; entire in s away from the poles
/// at s = -l_i.
std::complex<double> laplace_transform_distance(const SegmentPath& path, std::complex<double> s);

/// g(x) = prod_{j>=1} 1/(1 + x a^j), truncated with the certified tail
/// bound 0 <= -sum_{j>J} log(1+x a^j) <= x a^{J+1}/(1-a) carried over to
/// the product value.
HarmonicEval g_product(double x, double alpha, double eps = 1e-14);

/// Expected distance for the full level model. Infinite depth evaluates
/// f(x) = sum_{k>=1} (L/2^k) g(a^k x) at x = lambda*L*p/(2*alpha) with a
/// tail estimate that is exact at lambda = 0; finite depth evaluates the
/// finite sum with survival products cut at k_max.
HarmonicEval mean_distance_analytic(const CityConfig& cfg, double eps = kDefaultEps);

/// Second moment of the level model (exact exponential-length
/// integration, cross terms included).
HarmonicEval second_moment_analytic(const CityConfig& cfg, double eps = kDefaultEps);

/// Variance of the level model: second moment minus squared mean, both
/// compensated-summed. Throws std::logic_error if the result is negative
/// beyond the certified truncation bound.
HarmonicEval variance_analytic(const CityConfig& cfg, double eps = kDefaultEps);

/// Limit PGF of the turn deficit k_max - T:
///   (1-u) sum_{k>=0} (g(x a^k) - 1) u^k + 1,  |u| < 1/alpha,
/// with x the rho-scaled intensity lambda*L*p/2.
std::complex<double> turns_pgf(double x, std::complex<double> u, double alpha,
                               double eps = 1e-12);

/// E[k_max - T] in the infinite-depth limit: sum_{k>=0} (1 - g(x a^k)).
HarmonicEval mean_turn_deficit(double x, double alpha, double eps = 1e-12);

/// Deficit distribution of the infinite-depth model: P(deficit = m) is
/// g(x a^m) - g(x a^{m-1}) for m >= 1 and g(x) at m = 0. Returned up to
/// and including m_max.
std::vector<double> turn_deficit_pmf(double x, double alpha, int m_max);

} // namespace hyperpark
