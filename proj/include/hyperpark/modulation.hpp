#pragma once

#include <string>

#include "hyperpark/config.hpp"
#include "hyperpark/harmonic.hpp"
#include "hyperpark/rng.hpp"

namespace hyperpark {

/// Law of the positive per-street weight W that scales a level's pop-up
/// intensity. Gamma satisfies the small-mass hypothesis P(W<=t) = Theta(t^beta)
/// near 0; the constant and lognormal laws do not (degenerate and
/// faster-than-any-power respectively) but remain simulatable.
struct ModulationLaw {
  enum class Kind { Constant, Gamma, LogNormal };

  Kind kind = Kind::Constant;
  double a = 1.0; // constant: w; gamma: shape; lognormal: log-mean
  double b = 1.0; // gamma: scale; lognormal: log-sigma

  static ModulationLaw constant(double w) { return {Kind::Constant, w, 0.0}; }
  static ModulationLaw gamma(double shape, double scale) { return {Kind::Gamma, shape, scale}; }
  static ModulationLaw lognormal(double mu, double sigma) {
    return {Kind::LogNormal, mu, sigma};
  }

  void validate() const;
  double mean() const;
  double second_moment() const;
  /// True when P(W <= t) is bounded above and below by multiples of t^beta
  /// near zero (the hypothesis of the modulation scaling theorem).
  bool small_mass_condition() const { return kind == Kind::Gamma; }
  /// Constant laws consume no randomness, so a constant(1) run replays the
  /// unmodulated sample path exactly.
  double sample(Xoshiro256pp& rng) const;
  std::string describe() const;
};

/// G(u) = E[1/(1+uW)]. Closed form for constant laws; adaptive quadrature
/// against the law's density otherwise (domain split at t = 1/u,
/// log-substituted). Throws NumericError if the requested relative error
/// cannot be certified.
double modulated_G(double u, const ModulationLaw& law, double eps = 1e-10);

/// Expected distance under per-level modulation:
///   f(x) = sum_{k>=1} (L/2^k) prod_{j>k} G(alpha^j x),
/// x = lambda*L*p/(2*alpha). Reduces to mean_distance_analytic for
/// constant(1).
HarmonicEval modulated_mean_distance(const CityConfig& cfg, const ModulationLaw& law,
                                     double eps = kDefaultEps);

} // namespace hyperpark
