#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hyperpark/config.hpp"
#include "hyperpark/rng.hpp"

namespace hyperpark {

enum class Orientation { Vertical, Horizontal };

/// A realized Manhattan street arrangement on the unit square: per level,
/// the sorted coordinates of vertical (x) and horizontal (y) streets.
/// Levels are disjoint layers; their union carries the whole measure.
struct StreetNetwork {
  double p = 0.5;
  double lambda = 0.0;
  int k_max = 0;
  bool poisson = false;
  std::uint64_t seed = 0;

  std::vector<std::vector<double>> vertical;   // [level] -> sorted x coords
  std::vector<std::vector<double>> horizontal; // [level] -> sorted y coords

  /// Pop-up intensity lambda_k = mu_k * lambda on a level-k street.
  double intensity(int level) const;
  std::size_t street_total() const;
  const std::vector<double>& coords(Orientation o, int level) const {
    return o == Orientation::Vertical ? vertical[static_cast<std::size_t>(level)]
                                      : horizontal[static_cast<std::size_t>(level)];
  }
};

/// Dyadic construction: the level-0 central cross plus 2^k streets per
/// orientation at level k >= 1, at the odd multiples of 2^{-(k+1)}.
StreetNetwork generate_deterministic_network(const CityConfig& cfg);

/// Poisson construction: per level and orientation, Poisson(2^k) many
/// streets at iid uniform coordinates.
StreetNetwork generate_poisson_network(const CityConfig& cfg, Xoshiro256pp& rng);

/// Line-oriented text format: a config/seed header, then one street per
/// line as `level orientation coordinate intensity`.
void write_network(std::ostream& os, const StreetNetwork& net);
StreetNetwork read_network(std::istream& is);

} // namespace hyperpark
