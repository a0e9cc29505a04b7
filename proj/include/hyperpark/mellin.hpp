#pragma once

#include <complex>
#include <vector>

#include "hyperpark/config.hpp"
#include "hyperpark/harmonic.hpp"

namespace hyperpark {

struct MellinValue {
  std::complex<double> s;
  std::complex<double> value;
  double quad_error = 0.0;
};

/// Closed form of the transform of log(1+x): pi/(s sin(pi s)), valid on
/// the strip -1 < Re(s) < 0.
std::complex<double> mellin_log1p(std::complex<double> s);

/// g*(s) = int_0^inf g(x) x^{s-1} dx for Re(s) > 0, computed on the real
/// axis after x = e^t substitution (the super-polynomial decay of g makes
/// the transformed integrand die off at both ends).
MellinValue mellin_g_star(std::complex<double> s, double alpha, double eps = 1e-10);

/// Leading asymptotics of the mean: exponent -1/d_F, prefactor
/// L g*(1/d_F)/|log alpha| (sign fixed positive), log-period |log alpha|,
/// and the oscillation amplitude measured from one period of f(x)x^{1/d_F}.
struct AsymptoticEstimate {
  double exponent = 0.0;
  double prefactor = 0.0;
  double oscillation_amplitude = 0.0;
  double period = 0.0;
  double quad_error = 0.0;
};

AsymptoticEstimate asymptotic_mean_constant(const CityConfig& cfg, double eps = 1e-10);

/// One period of the normalized fluctuation P = f(x) x^{1/d_F}/C - 1,
/// sampled uniformly in log x starting at x0.
struct LogPeriodicProfile {
  std::vector<double> log_x_mod_period;
  std::vector<double> oscillation;
  double period = 0.0;
  double prefactor = 0.0;
  double amplitude = 0.0;
  double mean = 0.0;
};

LogPeriodicProfile log_periodic_profile(const CityConfig& cfg, double x0, int n_samples);

/// Jump-over transform
///   j*(s) = C0 * alpha^s / sin(pi s) * prod_{k=1}^{n}(1-a^{k-s})/(1-a^{k-s}/2),
/// normalized (C0 = pi prod (1-a^k/2)/(1-a^k)) so the s->0 residue is 1.
/// The sin poles at positive integers are cancelled by the product zeros;
/// the genuine pole between 0 and 2 sits at s = 1 + 1/d_F.
MellinValue jumpover_jstar(std::complex<double> s, double alpha, int n_terms);

/// Evaluate the mean formula as a function of its scaled argument x
/// (lambda is back-solved from x; depth is treated as infinite).
double mean_of_scale(const CityConfig& cfg, double x, double eps = kDefaultEps);

} // namespace hyperpark
