#include "hyperpark/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "hyperpark/quadrature.hpp"

namespace hyperpark {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

std::complex<double> mellin_log1p(std::complex<double> s) {
  if (!(s.real() > -1.0 && s.real() < 0.0)) {
    throw std::invalid_argument("mellin_log1p: requires -1 < Re(s) < 0");
  }
  return kPi / (s * std::sin(kPi * s));
}

MellinValue mellin_g_star(std::complex<double> s, double alpha, double eps) {
  if (!(s.real() > 0.0)) throw std::invalid_argument("mellin_g_star: requires Re(s) > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("mellin_g_star: alpha must be in (0,1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("mellin_g_star: eps must be > 0");

  const double re_s = s.real();
  auto integrand = [&](double t) -> std::complex<double> {
    return g_product(std::exp(t), alpha, 1e-15).value * std::exp(s * t);
  };

  // Coarse magnitude estimate fixes the absolute cutoff scale.
  ComplexQuadResult coarse =
      refined_trapezoid_complex(integrand, -20.0 / re_s, 10.0, 1e-4, 6, 1.0);
  const double scale = std::max(std::abs(coarse.value), 1e-12);
  const double eps_abs = 0.1 * eps * scale;

  // Left tail: |g| <= 1, so the remainder is e^{Re(s) t_lo}/Re(s).
  const double t_lo = (std::log(eps_abs * re_s) - 1.0) / re_s;
  // Right tail: march until the integrand magnitude undercuts the budget;
  // beyond that point it keeps falling super-exponentially.
  double t_hi = 2.0;
  while (std::abs(integrand(t_hi)) > 0.25 * eps_abs && t_hi < 400.0) t_hi += 1.0;
  t_hi += 2.0;

  const ComplexQuadResult r =
      refined_trapezoid_complex(integrand, t_lo, t_hi, 0.25 * eps, 16, 0.5);
  if (!r.converged) {
    throw NumericError("mellin_g_star: quadrature did not converge", r.abs_error);
  }
  const double tail_budget = std::exp(re_s * t_lo) / re_s + 0.5 * eps_abs;
  return MellinValue{s, r.value, r.abs_error + tail_budget};
}

double mean_of_scale(const CityConfig& cfg, double x, double eps) {
  if (!(x >= 0.0)) throw std::invalid_argument("mean_of_scale: x must be >= 0");
  CityConfig c = cfg;
  c.k_max = kInfiniteDepth;
  c.lambda = 2.0 * cfg.alpha() * x / (cfg.L * cfg.p);
  return mean_distance_analytic(c, eps).value;
}

AsymptoticEstimate asymptotic_mean_constant(const CityConfig& cfg, double eps) {
  cfg.validate();
  const double d_f = cfg.dimension();
  const double s0 = 1.0 / d_f;
  const double log_alpha = std::log(cfg.alpha());
  const MellinValue g_star = mellin_g_star(s0, cfg.alpha(), eps);

  AsymptoticEstimate est;
  est.exponent = -s0;
  est.period = -log_alpha; // = d_F log 2
  est.prefactor = cfg.L * g_star.value.real() / (-log_alpha);
  est.quad_error = cfg.L * g_star.quad_error / (-log_alpha);

  // Oscillation measured over one period of f(x) x^{s0} at large x.
  const double x0 = 1e6;
  const int n = 33;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double x = x0 * std::exp(est.period * i / n);
    const double v = mean_of_scale(cfg, x, 1e-13) * std::pow(x, s0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  est.oscillation_amplitude = 0.5 * (hi - lo);
  return est;
}

LogPeriodicProfile log_periodic_profile(const CityConfig& cfg, double x0, int n_samples) {
  cfg.validate();
  if (n_samples < 4) throw std::invalid_argument("log_periodic_profile: need >= 4 samples");
  if (!(x0 > 0.0)) throw std::invalid_argument("log_periodic_profile: x0 must be > 0");

  const AsymptoticEstimate est = asymptotic_mean_constant(cfg);
  LogPeriodicProfile prof;
  prof.period = est.period;
  prof.prefactor = est.prefactor;
  prof.log_x_mod_period.reserve(n_samples);
  prof.oscillation.reserve(n_samples);

  const double s0 = 1.0 / cfg.dimension();
  const double y0 = std::log(x0);
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n_samples; ++i) {
    const double y = y0 + est.period * i / n_samples;
    const double x = std::exp(y);
    const double p = mean_of_scale(cfg, x, 1e-13) * std::pow(x, s0) / est.prefactor - 1.0;
    prof.log_x_mod_period.push_back(std::fmod(y, est.period));
    prof.oscillation.push_back(p);
    sum += p;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  prof.amplitude = 0.5 * (hi - lo);
  prof.mean = sum / n_samples;
  return prof;
}

namespace {

double jstar_norm_constant(double alpha, int n_terms) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(alpha, n_terms);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  double c = kPi;
  double a_pow = 1.0;
  for (int k = 1; k <= n_terms; ++k) {
    a_pow *= alpha;
    c *= (1.0 - 0.5 * a_pow) / (1.0 - a_pow);
  }
  cache.emplace(key, c);
  return c;
}

// e^z - 1 with a series fallback for small |z| (std::expm1 is real-only).
std::complex<double> cexpm1(std::complex<double> z) {
  if (std::abs(z) < 1e-4) {
    return z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
  }
  return std::exp(z) - 1.0;
}

} // namespace

MellinValue jumpover_jstar(std::complex<double> s, double alpha, int n_terms) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("jumpover_jstar: alpha must be in (0,1)");
  }
  if (n_terms < 1) throw std::invalid_argument("jumpover_jstar: n_terms must be >= 1");

  const double log_alpha = std::log(alpha);
  std::complex<double> value = jstar_norm_constant(alpha, n_terms) * std::exp(s * log_alpha);

  // The sin pole at a positive integer m <= n_terms is cancelled by the
  // zero of the factor k = m; pair them up when s sits near one.
  int cancel_k = 0;
  const double re_round = std::round(s.real());
  if (std::abs(s.real() - re_round) < 0.2 && std::abs(s.imag()) < 0.2 && re_round >= 1.0 &&
      re_round <= n_terms) {
    cancel_k = static_cast<int>(re_round);
  }

  if (cancel_k == 0) {
    value /= std::sin(kPi * s);
  } else {
    // (1 - a^{m-s}) / sin(pi s) -> -log(alpha)/((-1)^m pi) as s -> m.
    const std::complex<double> delta = s - static_cast<double>(cancel_k);
    const std::complex<double> numer = -cexpm1(-delta * log_alpha);
    const double sign = (cancel_k % 2 == 0) ? 1.0 : -1.0;
    std::complex<double> ratio;
    if (std::abs(delta) == 0.0) {
      ratio = log_alpha / (sign * kPi);
    } else {
      ratio = numer / (sign * std::sin(kPi * delta));
    }
    value *= ratio;
  }

  for (int k = 1; k <= n_terms; ++k) {
    const std::complex<double> y = std::exp((static_cast<double>(k) - s) * log_alpha);
    const std::complex<double> denom = 1.0 - 0.5 * y;
    if (std::abs(denom) < 1e-8) {
      throw NumericError("jumpover_jstar: evaluation point too close to a pole of the product",
                         std::abs(denom));
    }
    if (k == cancel_k) {
      value /= denom; // numerator already folded into the sin ratio
    } else {
      value *= (1.0 - y) / denom;
    }
  }

  const double trunc = std::pow(alpha, n_terms + 1 - s.real()) / (1.0 - alpha);
  return MellinValue{s, value, std::abs(value) * trunc};
}

} // namespace hyperpark
