#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hyperpark {

/// Sentinel depth: level sums run with adaptive truncation instead of a
/// fixed cutoff. Every level series in the model has a geometric tail, so
/// the truncation depth is chosen from the requested tolerance.
inline constexpr int kInfiniteDepth = -1;

/// Default tolerance for adaptively truncated level sums (relative to L).
inline constexpr double kDefaultEps = 1e-12;

/// d_F = log(4/q)/log 2 for q in (0,1]. Equals 2 at q = 1 and grows as q
/// shrinks; always > 2 for q < 1.
double hyperfractal_dimension(double q);

/// Generic geometric refinement: lengths contract by s per level, masses
/// by r per level.
struct GeneralizedScaling {
  double s; // length contraction in (0,1)
  double r; // mass contraction in (0,1)
};

/// d_F = log r / log s.
double generalized_dimension(const GeneralizedScaling& g);

/// Immutable model parameters shared by the analytic and simulation
/// layers. All other quantities (q, alpha, d_F, per-level rates) derive
/// from these four numbers.
struct CityConfig {
  double p = 0.5;              // mass parameter in (0,1)
  double L = 1.0;              // base street length
  double lambda = 0.0;         // total pop-up intensity (slots per length)
  int k_max = kInfiniteDepth;  // deepest street level, or kInfiniteDepth

  double q() const { return 1.0 - p; }
  double alpha() const { return q() / 4.0; }
  double dimension() const { return hyperfractal_dimension(q()); }
  bool infinite_depth() const { return k_max == kInfiniteDepth; }

  // Scaled intensities used throughout: rho = lambda*L*p/2 and the mean
  // formula argument x = rho/alpha.
  double rho() const { return lambda * L * p / 2.0; }
  double mean_scale() const { return rho() / alpha(); }

  void validate() const;
};

/// mu_k = (p/2)(q/2)^k, the per-length measure density on a level-k street.
double level_density(const CityConfig& cfg, int k);

/// Per-level pop-up intensity and reciprocal mean segment length.
struct DerivedRates {
  double lambda_k;   // mu_k * lambda
  double seg_rate_k; // 2^k / L  (mean segment length 2^-k * L)
};
DerivedRates derived_rates(const CityConfig& cfg, int k);

/// Street count of the deterministic construction: 2 at level 0 (the
/// central cross), 2^{k+1} at level k >= 1.
std::int64_t street_count(int k);

/// Sum_{k=0}^{k_cut} street_count(k) * mu_k; approaches 1 geometrically.
double measure_mass(const CityConfig& cfg, int k_cut);

} // namespace hyperpark
