#include "hyperpark/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperpark/numeric.hpp"

namespace hyperpark {

namespace {

// (1 - e^{-u})/u with the removable singularity at u = 0.
double expm1_ratio(double u) {
  if (u == 0.0) return 1.0;
  return -std::expm1(-u) / u;
}

// ((1 - e^{-u}) - u e^{-u}) / u^2, stable near u = 0. Appears in the
// second-moment bracket; both numerator pieces are O(u), the difference
// is O(u^2).
double bracket_ratio(double u) {
  if (u < 1e-2) {
    // sum_{n>=2} (-1)^n (n-1)/n! u^{n-2}
    return 0.5 + u * (-1.0 / 3.0 + u * (1.0 / 8.0 + u * (-1.0 / 30.0 + u / 144.0)));
  }
  return (-std::expm1(-u) - u * std::exp(-u)) / (u * u);
}

void check_kind(const SegmentPath& path, LengthKind kind, const char* op) {
  path.validate();
  if (path.kind != kind) {
    throw std::invalid_argument(std::string(op) + ": wrong length kind for this operation");
  }
}

} // namespace

SegmentPath SegmentPath::fixed(std::vector<double> intensities, std::vector<double> lengths) {
  SegmentPath p{LengthKind::Fixed, std::move(intensities), std::move(lengths)};
  p.validate();
  return p;
}

SegmentPath SegmentPath::exponential(std::vector<double> intensities, std::vector<double> rates) {
  SegmentPath p{LengthKind::ExponentialRate, std::move(intensities), std::move(rates)};
  p.validate();
  return p;
}

void SegmentPath::validate() const {
  if (intensities.empty()) throw std::invalid_argument("SegmentPath: path must be nonempty");
  if (intensities.size() != sizes.size()) {
    throw std::invalid_argument("SegmentPath: intensity/size length mismatch");
  }
  for (double l : intensities) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("SegmentPath: intensities must be nonnegative and finite");
    }
  }
  for (double s : sizes) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("SegmentPath: lengths/rates must be positive and finite");
    }
  }
}

double mean_distance_fixed_path(const SegmentPath& path) {
  check_kind(path, LengthKind::Fixed, "mean_distance_fixed_path");
  CompensatedSum sum;
  double survival = 1.0;
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double lambda = path.intensities[i];
    const double len = path.sizes[i];
    // (1 - e^{-lambda len})/lambda -> len as lambda -> 0.
    sum.add(survival * len * expm1_ratio(lambda * len));
    survival *= std::exp(-lambda * len);
  }
  return sum.value();
}

double mean_distance_exponential(const SegmentPath& path) {
  check_kind(path, LengthKind::ExponentialRate, "mean_distance_exponential");
  CompensatedSum sum;
  double survival = 1.0;
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double a = 1.0 / (1.0 + path.intensities[i] / path.sizes[i]);
    sum.add(survival * a / path.sizes[i]);
    survival *= a;
  }
  return sum.value();
}

double second_moment_fixed_path(const SegmentPath& path) {
  check_kind(path, LengthKind::Fixed, "second_moment_fixed_path");
  CompensatedSum sum;
  double survival = 1.0;
  double sigma_prev = 0.0; // sum of lengths strictly before segment i
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double lambda = path.intensities[i];
    const double len = path.sizes[i];
    const double u = lambda * len;
    // [1 + lambda sigma_{i-1} - e^{-u}(1 + lambda sigma_i)] / lambda^2
    //   = sigma_{i-1} len (1-e^{-u})/u + len^2 ((1-e^{-u}) - u e^{-u})/u^2
    const double term = sigma_prev * len * expm1_ratio(u) + len * len * bracket_ratio(u);
    sum.add(2.0 * survival * term);
    survival *= std::exp(-u);
    sigma_prev += len;
  }
  return sum.value();
}

double second_moment_exponential(const SegmentPath& path) {
  check_kind(path, LengthKind::ExponentialRate, "second_moment_exponential");
  CompensatedSum sum;
  double survival = 1.0; // prod_{j<i} a_j
  double b_prefix = 0.0; // sum_{m<=i} b_m, updated before use
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double a = 1.0 / (1.0 + path.intensities[i] / path.sizes[i]);
    const double b = a / path.sizes[i];
    b_prefix += b;
    sum.add(2.0 * survival * b * b_prefix);
    survival *= a;
  }
  return sum.value();
}

std::complex<double> laplace_transform_distance(const SegmentPath& path,
                                                std::complex<double> s) {
  check_kind(path, LengthKind::Fixed, "laplace_transform_distance");
  std::complex<double> total = 0.0;
  std::complex<double> survival = 1.0;
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double lambda = path.intensities[i];
    const double len = path.sizes[i];
    const std::complex<double> z = lambda + s;
    if (lambda > 0.0) {
      const std::complex<double> w = z * len;
      std::complex<double> park;
      if (std::abs(w) < 1e-8) {
        // lambda (1 - e^{-w})/z = lambda len (1 - w/2 + w^2/6 - ...)
        park = lambda * len * (1.0 - w / 2.0 + w * w / 6.0);
      } else {
        park = lambda / z * (1.0 - std::exp(-w));
      }
      total += survival * park;
    }
    survival *= std::exp(-z * len);
  }
  return total + survival;
}

HarmonicEval g_product(double x, double alpha, double eps) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("g_product: x must be nonnegative and finite");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("g_product: alpha must be in (0,1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("g_product: eps must be > 0");
  if (x == 0.0) return HarmonicEval{1.0, 0.0, 0};

  CompensatedSum log_sum;
  double pow_a = 1.0;
  int terms = 0;
  double tail = std::numeric_limits<double>::infinity();
  while (tail > eps && terms < 20000) {
    pow_a *= alpha;
    log_sum.add(std::log1p(x * pow_a));
    ++terms;
    tail = x * pow_a * alpha / (1.0 - alpha);
  }
  const double value = std::exp(-log_sum.value());
  return HarmonicEval{value, value * tail, terms};
}

namespace {

// Survival factor 1/(1 + rho a^k).
double level_pass(double rho, double alpha, int k) {
  return 1.0 / (1.0 + rho * std::pow(alpha, k));
}

HarmonicEval mean_finite_depth(const CityConfig& cfg) {
  const double rho = cfg.rho();
  const double alpha = cfg.alpha();
  CompensatedSum sum;
  double survival = 1.0;
  for (int d = cfg.k_max; d >= 1; --d) {
    survival *= level_pass(rho, alpha, d);
    sum.add(std::ldexp(cfg.L, -d) * survival);
  }
  const double value = sum.value();
  return HarmonicEval{value, std::abs(value) * 1e-15 * (cfg.k_max + 1), cfg.k_max};
}

HarmonicEval second_moment_finite_depth(const CityConfig& cfg) {
  const double rho = cfg.rho();
  const double alpha = cfg.alpha();
  CompensatedSum sum;
  double deeper_survival = 1.0; // prod_{j>d} a_j
  double b_tail = 0.0;          // sum_{i>=d} b_i
  for (int d = cfg.k_max; d >= 1; --d) {
    const double a = level_pass(rho, alpha, d);
    const double b = std::ldexp(cfg.L, -d) * a;
    b_tail += b;
    sum.add(2.0 * deeper_survival * b * b_tail);
    deeper_survival *= a;
  }
  const double value = sum.value();
  return HarmonicEval{value, std::abs(value) * 1e-15 * (cfg.k_max + 1), cfg.k_max};
}

} // namespace

HarmonicEval mean_distance_analytic(const CityConfig& cfg, double eps) {
  cfg.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("mean_distance_analytic: eps must be > 0");
  if (!cfg.infinite_depth()) {
    if (cfg.k_max == 0) return HarmonicEval{0.0, 0.0, 0};
    return mean_finite_depth(cfg);
  }

  const double x = cfg.mean_scale();
  const double alpha = cfg.alpha();
  const double eps_abs = eps * cfg.L;
  const double g_eps = 1e-15;

  CompensatedSum sum;
  CompensatedSum err;
  double pow_a = 1.0;
  int k = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (k < 4000 && (k < 2 || residual > 0.5 * eps_abs)) {
    ++k;
    pow_a *= alpha;
    const HarmonicEval g = g_product(pow_a * x, alpha, g_eps);
    const double weight = std::ldexp(cfg.L, -k);
    sum.add(weight * g.value);
    err.add(weight * g.truncation_bound);
    // Dropped tail sits between L 2^-k g(a^{k+1} x) and L 2^-k.
    residual = std::ldexp(cfg.L, -k) * std::min(1.0, pow_a * alpha * alpha * x / (1.0 - alpha));
  }
  const HarmonicEval g_next = g_product(pow_a * alpha * x, alpha, g_eps);
  const double tail_estimate = std::ldexp(cfg.L, -k) * g_next.value;
  sum.add(tail_estimate);
  err.add(std::ldexp(cfg.L, -k) * (1.0 - g_next.value) + std::ldexp(cfg.L, -k) * g_next.truncation_bound);
  return HarmonicEval{sum.value(), err.value() + 4e-16 * cfg.L, k};
}

HarmonicEval second_moment_analytic(const CityConfig& cfg, double eps) {
  cfg.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("second_moment_analytic: eps must be > 0");
  if (!cfg.infinite_depth()) {
    if (cfg.k_max == 0) return HarmonicEval{0.0, 0.0, 0};
    return second_moment_finite_depth(cfg);
  }

  const double rho = cfg.rho();
  const double alpha = cfg.alpha();
  const double L2 = cfg.L * cfg.L;
  // Depth-d contributions are bounded by 4 L^2 4^-d; the inner survival
  // product and b-tail truncate at the same depth, adding O(2^-N).
  int n_cut = 8;
  while (n_cut < 1020 &&
         (4.0 / 3.0) * std::ldexp(L2, -2 * n_cut) + 4.0 * std::ldexp(L2, -n_cut) > 0.25 * eps * L2) {
    ++n_cut;
  }

  CompensatedSum sum;
  double deeper_survival = 1.0;
  double b_tail = 0.0;
  for (int d = n_cut; d >= 1; --d) {
    const double a = level_pass(rho, alpha, d);
    const double b = std::ldexp(cfg.L, -d) * a;
    b_tail += b;
    sum.add(2.0 * deeper_survival * b * b_tail);
    deeper_survival *= a;
  }
  const double value = sum.value();
  const double bound = (4.0 / 3.0) * std::ldexp(L2, -2 * n_cut) + 4.0 * std::ldexp(L2, -n_cut) +
                       value * rho * std::pow(alpha, n_cut + 1) / (1.0 - alpha) + 4e-16 * L2;
  return HarmonicEval{value, bound, n_cut};
}

HarmonicEval variance_analytic(const CityConfig& cfg, double eps) {
  const HarmonicEval m2 = second_moment_analytic(cfg, eps);
  const HarmonicEval m1 = mean_distance_analytic(cfg, eps);
  const double value = m2.value - m1.value * m1.value;
  const double bound =
      m2.truncation_bound + 2.0 * std::abs(m1.value) * m1.truncation_bound + 4e-16 * m2.value;
  if (value < -bound - 1e-14 * cfg.L * cfg.L) {
    throw std::logic_error("variance_analytic: negative variance beyond truncation bound (" +
                           std::to_string(value) + ", bound " + std::to_string(bound) + ")");
  }
  return HarmonicEval{value, bound, std::max(m1.terms_used, m2.terms_used)};
}

std::complex<double> turns_pgf(double x, std::complex<double> u, double alpha, double eps) {
  if (!(x >= 0.0)) throw std::invalid_argument("turns_pgf: x must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("turns_pgf: alpha in (0,1)");
  const double au = std::abs(u) * alpha;
  if (au >= 1.0) {
    throw std::invalid_argument("turns_pgf: series diverges for |u| >= 1/alpha");
  }
  if (x == 0.0) return 1.0;

  std::complex<double> series = 0.0;
  std::complex<double> u_pow = 1.0;
  double a_pow = 1.0;
  double tail = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20000 && tail > eps; ++k) {
    const HarmonicEval g = g_product(x * a_pow, alpha, 1e-15);
    series += (g.value - 1.0) * u_pow;
    u_pow *= u;
    a_pow *= alpha;
    // |g(x a^k) - 1| <= x a^{k+1}/(1-a)
    tail = x * a_pow * alpha / (1.0 - alpha) * std::abs(u_pow) / (1.0 - au) *
           std::max(1.0, std::abs(1.0 - u));
  }
  return (1.0 - u) * series + 1.0;
}

HarmonicEval mean_turn_deficit(double x, double alpha, double eps) {
  if (!(x >= 0.0)) throw std::invalid_argument("mean_turn_deficit: x must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("mean_turn_deficit: alpha in (0,1)");
  }
  if (x == 0.0) return HarmonicEval{0.0, 0.0, 0};
  CompensatedSum sum;
  double a_pow = 1.0;
  int k = 0;
  double tail = std::numeric_limits<double>::infinity();
  while (tail > eps && k < 20000) {
    const HarmonicEval g = g_product(x * a_pow, alpha, 1e-15);
    sum.add(1.0 - g.value);
    a_pow *= alpha;
    ++k;
    tail = x * a_pow * alpha / ((1.0 - alpha) * (1.0 - alpha));
  }
  return HarmonicEval{sum.value(), tail, k};
}

std::vector<double> turn_deficit_pmf(double x, double alpha, int m_max) {
  if (m_max < 0) throw std::invalid_argument("turn_deficit_pmf: m_max must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(m_max) + 1);
  double g_prev = g_product(x, alpha, 1e-15).value;
  pmf[0] = g_prev;
  double a_pow = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    a_pow *= alpha;
    const double g_m = g_product(x * a_pow, alpha, 1e-15).value;
    pmf[static_cast<std::size_t>(m)] = g_m - g_prev;
    g_prev = g_m;
  }
  return pmf;
}

} // namespace hyperpark
