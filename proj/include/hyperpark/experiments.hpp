#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperpark/config.hpp"
#include "hyperpark/modulation.hpp"
#include "hyperpark/simulate.hpp"

namespace hyperpark {

/// Least-squares fit of log(value) against log(lambda). On a
/// period-aligned grid (ratio exactly 1/alpha) the log-periodic term is
/// constant across points and lands in the intercept instead of biasing
/// the slope.
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_amplitude = 0.0; // half spread of the log residuals
  double se_slope = 0.0;
  double se_intercept = 0.0;
  std::vector<double> grid;
};

ExponentFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points,
                                 bool period_aligned, double alpha = 0.0);

/// Geometric lambda grid anchor * ratio^i, i = 0..count-1.
struct LambdaGrid {
  double anchor = 1e3;
  double ratio = 8.0;
  int count = 9;
  std::vector<double> values() const;
};

struct CheckResult {
  std::string name;
  double observed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t master_seed = 0;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::string to_text() const;
  std::string to_json_string() const;
};

struct VerifyOptions {
  std::size_t reps = 20000;
  std::uint64_t master_seed = 20260810;
  int threads = 0;
};

/// Named presets for cmd_verify: small/medium/large trade replication
/// count and grid size against runtime.
struct VerifyPreset {
  std::string name;
  std::size_t reps;
  int grid_points;
  int turns_decades;
};
VerifyPreset verify_preset(const std::string& name);

VerificationReport verify_mean_theorem(const CityConfig& cfg, const LambdaGrid& grid,
                                       const VerifyOptions& opts);
VerificationReport verify_variance_theorem(const CityConfig& cfg, const LambdaGrid& grid,
                                           const VerifyOptions& opts);
VerificationReport verify_turns_theorem(const CityConfig& cfg, int decades,
                                        const VerifyOptions& opts);
VerificationReport verify_modulation_theorem(const CityConfig& cfg,
                                             const std::vector<ModulationLaw>& laws,
                                             const LambdaGrid& grid,
                                             const VerifyOptions& opts);
VerificationReport verify_jumpover(const CityConfig& cfg, const LambdaGrid& grid,
                                   const VerifyOptions& opts);

} // namespace hyperpark
