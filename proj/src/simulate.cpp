#include "hyperpark/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hyperpark/numeric.hpp"

namespace hyperpark {

namespace {

void check_sim_config(const CityConfig& cfg, const char* op) {
  cfg.validate();
  if (cfg.infinite_depth()) {
    throw std::invalid_argument(std::string(op) + ": requires a finite k_max");
  }
}

// Park-or-pass on one segment. Returns true when the car parked; the
// distance driven on this segment is added to `distance` either way.
bool traverse_segment(double length, double intensity, Xoshiro256pp& rng, double& distance) {
  if (intensity > 0.0) {
    const double slot = rng.exponential(intensity);
    if (slot <= length) {
      distance += slot;
      return true;
    }
  }
  distance += length;
  return false;
}

SearchOutcome descend_levels(const CityConfig& cfg, const ModulationLaw* law,
                             Xoshiro256pp& rng, TerminalRule rule) {
  SearchOutcome out;
  out.level_trace.reserve(static_cast<std::size_t>(cfg.k_max) + 1);
  for (int d = cfg.k_max; d >= 1; --d) {
    out.level_trace.push_back(d);
    const double w = law ? law->sample(rng) : 1.0;
    const double length = rng.exponential(std::ldexp(1.0, d) / cfg.L);
    const double intensity = level_density(cfg, d) * cfg.lambda * w;
    if (traverse_segment(length, intensity, rng, out.distance)) {
      out.parked = true;
      out.turns = cfg.k_max - d;
      return out;
    }
  }

  // All depths >= 1 exhausted; the car turns onto the level-0 boulevard.
  out.level_trace.push_back(0);
  out.turns = cfg.k_max;
  if (rule == TerminalRule::FormulaFaithful) {
    out.parked = true; // parks at the end of the path, no extra distance
    return out;
  }
  const double base_intensity = level_density(cfg, 0) * cfg.lambda;
  if (!(base_intensity > 0.0) && !law) {
    out.parked = false;
    return out;
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double w = law ? law->sample(rng) : 1.0;
    const double length = rng.exponential(1.0 / cfg.L);
    if (traverse_segment(length, base_intensity * w, rng, out.distance)) {
      out.parked = true;
      return out;
    }
    ++out.turns; // each fresh level-0 street is one more turn
  }
  out.parked = false;
  return out;
}

} // namespace

SearchOutcome simulate_jumpless(const CityConfig& cfg, Xoshiro256pp& rng, TerminalRule rule) {
  check_sim_config(cfg, "simulate_jumpless");
  return descend_levels(cfg, nullptr, rng, rule);
}

SearchOutcome simulate_modulated(const CityConfig& cfg, const ModulationLaw& law,
                                 Xoshiro256pp& rng, TerminalRule rule) {
  check_sim_config(cfg, "simulate_modulated");
  law.validate();
  return descend_levels(cfg, &law, rng, rule);
}

SearchOutcome simulate_jumpover(const CityConfig& cfg, Xoshiro256pp& rng, TerminalRule rule) {
  check_sim_config(cfg, "simulate_jumpover");
  SearchOutcome out;
  out.level_trace.reserve(16);
  int d = cfg.k_max;
  for (;;) {
    out.level_trace.push_back(d);
    const double length = rng.exponential(std::ldexp(1.0, d) / cfg.L);
    const double intensity = level_density(cfg, d) * cfg.lambda;
    if (traverse_segment(length, intensity, rng, out.distance)) {
      out.parked = true;
      out.turns = static_cast<int>(out.level_trace.size()) - 1;
      return out;
    }
    if (d == 0) break;
    // Jump size J >= 1 with P(J=j) = 2^-j; levels past 0 land on 0.
    const int jump = static_cast<int>(std::ceil(-std::log2(rng.uniform_pos())));
    d = std::max(d - std::max(jump, 1), 0);
  }

  out.turns = static_cast<int>(out.level_trace.size()) - 1;
  if (rule == TerminalRule::FormulaFaithful) {
    out.parked = true;
    return out;
  }
  const double base_intensity = level_density(cfg, 0) * cfg.lambda;
  if (!(base_intensity > 0.0)) {
    out.parked = false;
    return out;
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double length = rng.exponential(1.0 / cfg.L);
    if (traverse_segment(length, base_intensity, rng, out.distance)) {
      out.parked = true;
      return out;
    }
    ++out.turns;
  }
  out.parked = false;
  return out;
}

NetworkWalkStart northwest_start(const StreetNetwork& net) {
  for (int level = net.k_max; level >= 0; --level) {
    const auto& hs = net.horizontal[static_cast<std::size_t>(level)];
    if (!hs.empty()) {
      return NetworkWalkStart{0.0, hs.back(), Orientation::Horizontal, level};
    }
  }
  for (int level = net.k_max; level >= 0; --level) {
    const auto& vs = net.vertical[static_cast<std::size_t>(level)];
    if (!vs.empty()) {
      return NetworkWalkStart{vs.front(), 1.0, Orientation::Vertical, level};
    }
  }
  throw std::invalid_argument("northwest_start: network has no streets");
}

namespace {

// Next crossing coordinate moving East (x' > from, smallest) or South
// (y' < from, largest) among the given level's perpendicular streets.
bool next_crossing(const std::vector<double>& coords, double from, bool east, double& hit) {
  if (east) {
    auto it = std::upper_bound(coords.begin(), coords.end(), from);
    if (it == coords.end()) return false;
    hit = *it;
    return true;
  }
  auto it = std::lower_bound(coords.begin(), coords.end(), from);
  if (it == coords.begin()) return false;
  hit = *(it - 1);
  return true;
}

} // namespace

SearchOutcome simulate_on_network(const StreetNetwork& net, const NetworkWalkStart& start,
                                  Strategy strategy, Xoshiro256pp& rng) {
  SearchOutcome out;
  double x = start.x;
  double y = start.y;
  Orientation on = start.orientation;
  int level = start.level;

  for (;;) {
    out.level_trace.push_back(level);
    const bool east = (on == Orientation::Horizontal);
    const double from = east ? x : y;
    const auto& cross_levels = east ? net.vertical : net.horizontal;

    // Find the turn target on this street, if any.
    bool found = false;
    double hit = 0.0;
    int hit_level = -1;
    const int lo_level = (strategy == Strategy::Jumpless) ? level - 1 : 0;
    for (int cand = lo_level; cand <= level - 1; ++cand) {
      if (cand < 0) continue;
      double c;
      if (next_crossing(cross_levels[static_cast<std::size_t>(cand)], from, east, c)) {
        const bool closer = east ? (c < hit) : (c > hit);
        if (!found || closer) {
          found = true;
          hit = c;
          hit_level = cand;
        }
      }
    }

    const double boundary = east ? 1.0 - from : from; // distance to the square's edge
    const double travel = found ? std::abs(hit - from) : boundary;
    const double intensity = net.intensity(level);
    if (intensity > 0.0) {
      const double slot = rng.exponential(intensity);
      if (slot <= travel) {
        out.distance += slot;
        out.parked = true;
        out.turns = static_cast<int>(out.level_trace.size()) - 1;
        return out;
      }
    }
    out.distance += travel;
    if (!found) {
      out.parked = false; // left the unit square (or ran out of streets)
      out.turns = static_cast<int>(out.level_trace.size()) - 1;
      return out;
    }
    if (east) {
      x = hit;
    } else {
      y = hit;
    }
    on = east ? Orientation::Vertical : Orientation::Horizontal;
    level = hit_level;
  }
}

namespace {

int resolve_threads(int threads, std::size_t reps) {
  int t = threads;
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  if (t > 64) t = 64;
  if (static_cast<std::size_t>(t) > reps) t = static_cast<int>(reps);
  return t;
}

template <typename RunOne>
MonteCarloSummary run_replications(int k_max, std::size_t reps, std::uint64_t master_seed,
                                   int threads, std::vector<CompactOutcome>* outcomes,
                                   RunOne&& run_one) {
  if (reps < 1) throw std::invalid_argument("monte_carlo: reps must be >= 1");
  std::vector<double> distances(reps);
  std::vector<std::int32_t> turns(reps);
  std::vector<std::int32_t> visited(reps);
  std::vector<std::uint8_t> parked(reps);

  const int n_threads = resolve_threads(threads, reps);
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Xoshiro256pp rng = RngStream{master_seed, r}.engine();
      const SearchOutcome o = run_one(rng);
      distances[r] = o.distance;
      turns[r] = o.turns;
      visited[r] = static_cast<std::int32_t>(o.level_trace.size());
      parked[r] = o.parked ? 1 : 0;
    }
  };
  if (n_threads == 1) {
    worker(0, reps);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    const std::size_t chunk = (reps + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const std::size_t begin = chunk * static_cast<std::size_t>(t);
      const std::size_t end = std::min(reps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  MonteCarloSummary s;
  s.reps = reps;
  s.master_seed = master_seed;
  const SampleMoments m = sample_moments(distances);
  s.mean = m.mean;
  s.variance = m.variance;
  s.se_mean = m.se_mean;
  s.se_variance = m.se_variance;

  s.deficit_histogram.assign(static_cast<std::size_t>(std::max(k_max, 0)) + 1, 0);
  std::vector<double> deficits(reps);
  std::size_t parked_count = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const int deficit = std::clamp<int>(k_max - turns[r], 0, std::max(k_max, 0));
    ++s.deficit_histogram[static_cast<std::size_t>(deficit)];
    deficits[r] = deficit;
    parked_count += parked[r];
  }
  const SampleMoments md = sample_moments(deficits);
  s.mean_deficit = md.mean;
  s.se_deficit = md.se_mean;
  s.parked_rate = static_cast<double>(parked_count) / static_cast<double>(reps);

  if (outcomes) {
    outcomes->resize(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      (*outcomes)[r] = CompactOutcome{distances[r], turns[r], visited[r], parked[r] != 0};
    }
  }
  return s;
}

} // namespace

MonteCarloSummary monte_carlo(const CityConfig& cfg, Strategy strategy,
                              const std::optional<ModulationLaw>& law, std::size_t reps,
                              std::uint64_t master_seed, TerminalRule rule, int threads,
                              std::vector<CompactOutcome>* outcomes) {
  check_sim_config(cfg, "monte_carlo");
  if (law) {
    law->validate();
    if (strategy != Strategy::Jumpless) {
      throw std::invalid_argument("monte_carlo: modulation applies to the jumpless strategy");
    }
    const ModulationLaw l = *law;
    return run_replications(cfg.k_max, reps, master_seed, threads, outcomes,
                            [&cfg, l, rule](Xoshiro256pp& rng) {
                              return simulate_modulated(cfg, l, rng, rule);
                            });
  }
  if (strategy == Strategy::Jumpless) {
    return run_replications(
        cfg.k_max, reps, master_seed, threads, outcomes,
        [&cfg, rule](Xoshiro256pp& rng) { return simulate_jumpless(cfg, rng, rule); });
  }
  return run_replications(
      cfg.k_max, reps, master_seed, threads, outcomes,
      [&cfg, rule](Xoshiro256pp& rng) { return simulate_jumpover(cfg, rng, rule); });
}

MonteCarloSummary monte_carlo_network(const CityConfig& cfg, Strategy strategy,
                                      std::size_t reps, std::uint64_t master_seed,
                                      const StreetNetwork* fixed, int threads,
                                      std::vector<CompactOutcome>* outcomes) {
  check_sim_config(cfg, "monte_carlo_network");
  return run_replications(cfg.k_max, reps, master_seed, threads, outcomes,
                          [&cfg, strategy, fixed](Xoshiro256pp& rng) {
                            if (fixed) {
                              return simulate_on_network(*fixed, northwest_start(*fixed),
                                                         strategy, rng);
                            }
                            const StreetNetwork net = generate_poisson_network(cfg, rng);
                            return simulate_on_network(net, northwest_start(net), strategy,
                                                       rng);
                          });
}

} // namespace hyperpark
