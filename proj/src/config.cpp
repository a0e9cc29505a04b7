#include "hyperpark/config.hpp"

#include <cmath>
#include <string>

namespace hyperpark {

double hyperfractal_dimension(double q) {
  if (!(q > 0.0) || q > 1.0) {
    throw std::invalid_argument("hyperfractal_dimension: q must be in (0,1], got " +
                                std::to_string(q));
  }
  return std::log(4.0 / q) / std::log(2.0);
}

double generalized_dimension(const GeneralizedScaling& g) {
  if (!(g.s > 0.0 && g.s < 1.0)) {
    throw std::invalid_argument("generalized_dimension: s must be in (0,1)");
  }
  if (!(g.r > 0.0 && g.r < 1.0)) {
    throw std::invalid_argument("generalized_dimension: r must be in (0,1)");
  }
  return std::log(g.r) / std::log(g.s);
}

void CityConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("CityConfig: p must be in (0,1), got " + std::to_string(p));
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("CityConfig: L must be positive and finite");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("CityConfig: lambda must be nonnegative and finite");
  }
  if (k_max < kInfiniteDepth) {
    throw std::invalid_argument("CityConfig: k_max must be >= 0 or kInfiniteDepth");
  }
}

double level_density(const CityConfig& cfg, int k) {
  if (k < 0) throw std::invalid_argument("level_density: k must be >= 0");
  return 0.5 * cfg.p * std::pow(0.5 * cfg.q(), k);
}

DerivedRates derived_rates(const CityConfig& cfg, int k) {
  return DerivedRates{level_density(cfg, k) * cfg.lambda, std::ldexp(1.0, k) / cfg.L};
}

std::int64_t street_count(int k) {
  if (k < 0) throw std::invalid_argument("street_count: k must be >= 0");
  if (k == 0) return 2;
  if (k >= 62) throw std::invalid_argument("street_count: k too large");
  return std::int64_t{1} << (k + 1);
}

double measure_mass(const CityConfig& cfg, int k_cut) {
  // street_count(k) * mu_k = p q^k for every k, so the partial sums are
  // plain geometric sums; keep the explicit product as the invariant check.
  double total = 0.0;
  for (int k = 0; k <= k_cut; ++k) {
    total += static_cast<double>(street_count(k)) * level_density(cfg, k);
  }
  return total;
}

} // namespace hyperpark
