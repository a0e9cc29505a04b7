#include "hyperpark/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace hyperpark {

namespace {

void check_depth(const CityConfig& cfg, const char* op) {
  cfg.validate();
  if (cfg.infinite_depth()) {
    throw std::invalid_argument(std::string(op) + ": requires a finite k_max");
  }
  if (cfg.k_max > 24) {
    throw std::invalid_argument(std::string(op) +
                                ": k_max > 24 would materialize too many streets");
  }
}

} // namespace

double StreetNetwork::intensity(int level) const {
  CityConfig cfg{p, 1.0, lambda, k_max};
  return level_density(cfg, level) * lambda;
}

std::size_t StreetNetwork::street_total() const {
  std::size_t n = 0;
  for (const auto& v : vertical) n += v.size();
  for (const auto& h : horizontal) n += h.size();
  return n;
}

StreetNetwork generate_deterministic_network(const CityConfig& cfg) {
  check_depth(cfg, "generate_deterministic_network");
  StreetNetwork net;
  net.p = cfg.p;
  net.lambda = cfg.lambda;
  net.k_max = cfg.k_max;
  net.poisson = false;
  net.vertical.resize(static_cast<std::size_t>(cfg.k_max) + 1);
  net.horizontal.resize(static_cast<std::size_t>(cfg.k_max) + 1);

  net.vertical[0] = {0.5};
  net.horizontal[0] = {0.5};
  for (int k = 1; k <= cfg.k_max; ++k) {
    const std::int64_t count = std::int64_t{1} << k;
    const double spacing = std::ldexp(1.0, -(k + 1));
    auto& v = net.vertical[static_cast<std::size_t>(k)];
    auto& h = net.horizontal[static_cast<std::size_t>(k)];
    v.reserve(static_cast<std::size_t>(count));
    h.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      const double coord = spacing * static_cast<double>(2 * i + 1);
      v.push_back(coord);
      h.push_back(coord);
    }
  }
  return net;
}

StreetNetwork generate_poisson_network(const CityConfig& cfg, Xoshiro256pp& rng) {
  check_depth(cfg, "generate_poisson_network");
  StreetNetwork net;
  net.p = cfg.p;
  net.lambda = cfg.lambda;
  net.k_max = cfg.k_max;
  net.poisson = true;
  net.vertical.resize(static_cast<std::size_t>(cfg.k_max) + 1);
  net.horizontal.resize(static_cast<std::size_t>(cfg.k_max) + 1);

  for (int k = 0; k <= cfg.k_max; ++k) {
    const double rate = std::ldexp(1.0, k);
    for (auto* side : {&net.vertical[static_cast<std::size_t>(k)],
                       &net.horizontal[static_cast<std::size_t>(k)]}) {
      const std::int64_t count = rng.poisson(rate);
      side->reserve(static_cast<std::size_t>(count));
      for (std::int64_t i = 0; i < count; ++i) side->push_back(rng.uniform());
      std::sort(side->begin(), side->end());
    }
  }
  return net;
}

void write_network(std::ostream& os, const StreetNetwork& net) {
  os.precision(17);
  os << "# hyperpark network v1\n";
  os << "# p=" << net.p << " lambda=" << net.lambda << " k_max=" << net.k_max
     << " variant=" << (net.poisson ? "poisson" : "deterministic") << " seed=" << net.seed
     << "\n";
  CityConfig cfg{net.p, 1.0, net.lambda, net.k_max};
  for (int k = 0; k <= net.k_max; ++k) {
    const double intensity = level_density(cfg, k) * net.lambda;
    for (double x : net.vertical[static_cast<std::size_t>(k)]) {
      os << k << " V " << x << " " << intensity << "\n";
    }
    for (double y : net.horizontal[static_cast<std::size_t>(k)]) {
      os << k << " H " << y << " " << intensity << "\n";
    }
  }
}

StreetNetwork read_network(std::istream& is) {
  StreetNetwork net;
  bool header_seen = false;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string token;
      while (hs >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "p") net.p = std::stod(val);
        else if (key == "lambda") net.lambda = std::stod(val);
        else if (key == "k_max") net.k_max = std::stoi(val);
        else if (key == "variant") net.poisson = (val == "poisson");
        else if (key == "seed") net.seed = std::stoull(val);
        header_seen = true;
      }
      continue;
    }
    if (!header_seen) throw std::runtime_error("read_network: missing header line");
    if (net.vertical.empty()) {
      net.vertical.resize(static_cast<std::size_t>(net.k_max) + 1);
      net.horizontal.resize(static_cast<std::size_t>(net.k_max) + 1);
    }
    std::istringstream ls(line);
    int level;
    std::string orient;
    double coord, intensity;
    if (!(ls >> level >> orient >> coord >> intensity)) {
      throw std::runtime_error("read_network: malformed street line: " + line);
    }
    if (level < 0 || level > net.k_max) {
      throw std::runtime_error("read_network: street level out of range");
    }
    if (orient == "V") {
      net.vertical[static_cast<std::size_t>(level)].push_back(coord);
    } else if (orient == "H") {
      net.horizontal[static_cast<std::size_t>(level)].push_back(coord);
    } else {
      throw std::runtime_error("read_network: bad orientation: " + orient);
    }
  }
  if (net.vertical.empty()) {
    net.vertical.resize(static_cast<std::size_t>(std::max(net.k_max, 0)) + 1);
    net.horizontal.resize(static_cast<std::size_t>(std::max(net.k_max, 0)) + 1);
  }
  for (auto& v : net.vertical) std::sort(v.begin(), v.end());
  for (auto& h : net.horizontal) std::sort(h.begin(), h.end());
  return net;
}

} // namespace hyperpark
