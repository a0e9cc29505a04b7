#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hyperpark/config.hpp"
#include "hyperpark/modulation.hpp"
#include "hyperpark/network.hpp"
#include "hyperpark/rng.hpp"

namespace hyperpark {

enum class Strategy { Jumpless, JumpOver };

/// What happens when the car exhausts the descending path without finding
/// a slot. FormulaFaithful parks at the end of the path (the reading
/// implied by the closed-form mean); PersistLevelZero keeps drawing fresh
/// level-0 segments until a slot appears.
enum class TerminalRule { FormulaFaithful, PersistLevelZero };

struct SearchOutcome {
  double distance = 0.0;
  int turns = 0;
  bool parked = false;
  std::vector<int> level_trace;

  int deficit(int k_max) const { return k_max - turns < 0 ? 0 : k_max - turns; }
};

/// Segment-model search descending one level per turn: depth k_max down
/// to 1 (segment at depth k: length Exp(mean 2^-k L), slot intensity
/// mu_k lambda), then the terminal rule.
SearchOutcome simulate_jumpless(const CityConfig& cfg, Xoshiro256pp& rng,
                                TerminalRule rule = TerminalRule::FormulaFaithful);

/// Segment-model search whose next level is k - J with P(J = j) = 2^-j,
/// clamped to level 0 (the clamp absorbs the geometric law's deficit).
SearchOutcome simulate_jumpover(const CityConfig& cfg, Xoshiro256pp& rng,
                                TerminalRule rule = TerminalRule::FormulaFaithful);

/// Jumpless mechanics with each level's intensity scaled by a fresh
/// draw W_level from the law (annealed per replication).
SearchOutcome simulate_modulated(const CityConfig& cfg, const ModulationLaw& law,
                                 Xoshiro256pp& rng,
                                 TerminalRule rule = TerminalRule::FormulaFaithful);

struct NetworkWalkStart {
  double x = 0.0;
  double y = 1.0;
  Orientation orientation = Orientation::Horizontal;
  int level = 0;
};

/// Westmost point of the northmost deepest-level horizontal street (falls
/// back to the deepest vertical when a Poisson draw left no horizontal).
NetworkWalkStart northwest_start(const StreetNetwork& net);

/// Geometric walk on a realized network, alternating East and South legs.
/// Jumpless turns at the first crossing street exactly one level lower;
/// jump-over turns at the first crossing street of any lower level. Slots
/// appear at the current street's intensity. Walks that leave the unit
/// square are flagged unparked with the traversed distance.
SearchOutcome simulate_on_network(const StreetNetwork& net, const NetworkWalkStart& start,
                                  Strategy strategy, Xoshiro256pp& rng);

struct CompactOutcome {
  double distance = 0.0;
  std::int32_t turns = 0;
  std::int32_t levels_visited = 0;
  bool parked = false;
};

struct MonteCarloSummary {
  std::size_t reps = 0;
  std::uint64_t master_seed = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  double parked_rate = 0.0;
  double mean_deficit = 0.0;
  double se_deficit = 0.0;
  std::vector<std::uint64_t> deficit_histogram; // index = clamp(k_max - turns, 0, k_max)
};

/// Seeded, replication-addressed aggregation: replication r always runs on
/// stream (master_seed, r), so the summary is identical at any thread
/// count. Pass `law` to modulate the jumpless strategy; pass `outcomes`
/// to also collect per-replication rows.
MonteCarloSummary monte_carlo(const CityConfig& cfg, Strategy strategy,
                              const std::optional<ModulationLaw>& law, std::size_t reps,
                              std::uint64_t master_seed,
                              TerminalRule rule = TerminalRule::FormulaFaithful,
                              int threads = 0, std::vector<CompactOutcome>* outcomes = nullptr);

/// Monte Carlo over network walks. With `fixed` null, each replication
/// draws a fresh Poisson network from its own stream; otherwise all
/// replications walk the given network.
MonteCarloSummary monte_carlo_network(const CityConfig& cfg, Strategy strategy,
                                      std::size_t reps, std::uint64_t master_seed,
                                      const StreetNetwork* fixed = nullptr, int threads = 0,
                                      std::vector<CompactOutcome>* outcomes = nullptr);

} // namespace hyperpark
