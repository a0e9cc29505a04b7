#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hyperpark {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ with inline samplers for the distributions the simulators
/// draw from. Samplers are implemented here (not via <random>) so that a
/// given seed produces the same stream on every platform and build.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed = 1) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
      state_[0] = 0x8BADF00DDEADBEEFULL;
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; safe as a log argument.
  double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
  }

  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double theta = 6.283185307179586476925286766559 * uniform();
    return r * std::cos(theta);
  }

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

  /// Marsaglia-Tsang for shape >= 1; boosted by U^{1/shape} below 1.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
      throw std::invalid_argument("gamma: shape and scale must be > 0");
    }
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
  }

  /// Exact Poisson sampling: product method below mean 12, PTRS
  /// (Hoermann's transformed rejection) above.
  std::int64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 12.0) {
      const double limit = std::exp(-mean);
      std::int64_t k = 0;
      double prod = uniform_pos();
      while (prod > limit) {
        ++k;
        prod *= uniform_pos();
      }
      return k;
    }
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform_pos();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const double k = kf;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * log_mean - mean - std::lgamma(k + 1.0)) {
        return static_cast<std::int64_t>(kf);
      }
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

/// Replication-addressed stream: the pair (master_seed, stream_id) fully
/// determines the sample path, independent of scheduling order.
struct RngStream {
  std::uint64_t master_seed = 1;
  std::uint64_t stream_id = 0;

  Xoshiro256pp engine() const {
    std::uint64_t sm = master_seed;
    const std::uint64_t base = splitmix64(sm);
    sm = base ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
    return Xoshiro256pp(splitmix64(sm));
  }
};

} // namespace hyperpark
