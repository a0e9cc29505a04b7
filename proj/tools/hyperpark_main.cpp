#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperpark/config.hpp"
#include "hyperpark/experiments.hpp"
#include "hyperpark/harmonic.hpp"
#include "hyperpark/mellin.hpp"
#include "hyperpark/modulation.hpp"
#include "hyperpark/network.hpp"
#include "hyperpark/simulate.hpp"
#include "hyperpark/version.hpp"

namespace {

using namespace hyperpark;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Flat key/value config file: one `key value` or `key=value` pair per
/// line, '#' comments. Recognized keys: p, L, lambda, k_max, seed,
/// strategy, modulation, beta, theta.
std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (auto& ch : line) {
      if (ch == '=') ch = ' ';
    }
    std::istringstream ls(line);
    std::string key, value;
    if (ls >> key >> value) kv[key] = value;
  }
  return kv;
}

struct ModelFlags {
  double p = 0.5;
  double L = 1.0;
  double lambda = 100.0;
  int k_max = 25;
  std::uint64_t seed = 1;
  int threads = 0;
  double eps = kDefaultEps;
  std::string modulation = "none";
  double beta = 1.0;
  double theta = 1.0;
  std::string strategy = "jumpless";
  std::string config_path;

  CityConfig city() const {
    CityConfig c{p, L, lambda, k_max};
    c.validate();
    return c;
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags* m, bool with_strategy) {
  cmd->add_option("--config", m->config_path, "flat key/value config file");
  cmd->add_option("--p", m->p, "mass parameter in (0,1)");
  cmd->add_option("--L", m->L, "base street length");
  cmd->add_option("--lambda", m->lambda, "total pop-up intensity");
  cmd->add_option("--kmax", m->k_max, "depth cutoff; -1 means infinite (analytic only)");
  cmd->add_option("--seed", m->seed, "master seed");
  cmd->add_option("--threads", m->threads, "worker threads (0 = hardware)");
  cmd->add_option("--eps", m->eps, "truncation tolerance for analytic sums");
  cmd->add_option("--modulation", m->modulation,
                  "none | constant:w | gamma:shape:scale | lognormal:mu:sigma");
  if (with_strategy) {
    cmd->add_option("--strategy", m->strategy, "jumpless | jumpover | network");
  }
}

bool flag_given(const CLI::App& cmd, const std::string& name) {
  const CLI::Option* opt = cmd.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

/// Config file values act as defaults; explicit flags override them.
void apply_config_file(const CLI::App& cmd, ModelFlags* m) {
  if (m->config_path.empty()) return;
  const auto kv = load_config_file(m->config_path);
  auto set_if_unset = [&](const char* flag, const char* key, auto setter) {
    if (!flag_given(cmd, flag)) {
      auto it = kv.find(key);
      if (it != kv.end()) setter(it->second);
    }
  };
  set_if_unset("--p", "p", [&](const std::string& v) { m->p = std::stod(v); });
  set_if_unset("--L", "L", [&](const std::string& v) { m->L = std::stod(v); });
  set_if_unset("--lambda", "lambda", [&](const std::string& v) { m->lambda = std::stod(v); });
  set_if_unset("--kmax", "k_max", [&](const std::string& v) { m->k_max = std::stoi(v); });
  set_if_unset("--seed", "seed", [&](const std::string& v) { m->seed = std::stoull(v); });
  set_if_unset("--modulation", "modulation",
               [&](const std::string& v) { m->modulation = v; });
  if (kv.count("beta")) m->beta = std::stod(kv.at("beta"));
  if (kv.count("theta")) m->theta = std::stod(kv.at("theta"));
  if (!flag_given(cmd, "--strategy") && kv.count("strategy")) m->strategy = kv.at("strategy");
}

/// Seed default can come from the environment, flags/config still win.
void apply_seed_env(const CLI::App& cmd, ModelFlags* m) {
  if (flag_given(cmd, "--seed")) return;
  if (!m->config_path.empty() && load_config_file(m->config_path).count("seed")) return;
  if (const char* env = std::getenv("HYPERPARK_SEED")) {
    m->seed = std::strtoull(env, nullptr, 10);
  }
}

std::optional<ModulationLaw> parse_modulation(const std::string& spec, double beta,
                                              double theta) {
  if (spec.empty() || spec == "none") return std::nullopt;
  std::vector<std::string> parts;
  std::istringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  const std::string kind = parts[0];
  const double a = parts.size() > 1 ? std::stod(parts[1]) : beta;
  const double b = parts.size() > 2 ? std::stod(parts[2]) : theta;
  ModulationLaw law;
  if (kind == "constant") {
    law = ModulationLaw::constant(a);
  } else if (kind == "gamma") {
    law = ModulationLaw::gamma(a, b);
  } else if (kind == "lognormal") {
    law = ModulationLaw::lognormal(a, b);
  } else {
    throw std::invalid_argument("unknown modulation kind: " + kind);
  }
  law.validate();
  return law;
}

void write_manifest(std::ostream& os, const std::string& subcommand, const ModelFlags& m,
                    const std::string& extra) {
  os << "# hyperpark " << kVersion << "\n";
  os << "# manifest: subcommand=" << subcommand << " p=" << format_double(m.p)
     << " L=" << format_double(m.L) << " lambda=" << format_double(m.lambda)
     << " k_max=" << m.k_max << " seed=" << m.seed << " modulation=" << m.modulation
     << (extra.empty() ? "" : " " + extra) << "\n";
  os << "# timestamp: " << iso_timestamp() << "\n";
}

std::vector<double> lambda_values(const ModelFlags& m, const std::string& grid_spec) {
  if (grid_spec.empty()) return {m.lambda};
  double anchor, ratio;
  int count;
  char c1, c2;
  std::istringstream ss(grid_spec);
  if (!(ss >> anchor >> c1 >> ratio >> c2 >> count) || c1 != ':' || c2 != ':') {
    throw std::invalid_argument("bad --lambda-grid, want start:ratio:count");
  }
  return LambdaGrid{anchor, ratio, count}.values();
}

// ----------------------------------------------------------------------
// analytic

int run_analytic(const ModelFlags& m, const std::string& quantity,
                 const std::string& grid_spec, double x_arg, const std::string& out_path) {
  std::ostringstream body;
  body << "# schema: analytic-v1 lambda,value,trunc_bound\n";
  body << "lambda,value,trunc_bound\n";
  const auto law = parse_modulation(m.modulation, m.beta, m.theta);

  if (quantity == "g" || quantity == "G") {
    const double alpha = CityConfig{m.p, m.L, 0.0, kInfiniteDepth}.alpha();
    double value, bound;
    if (quantity == "g") {
      const HarmonicEval g = g_product(x_arg, alpha, m.eps);
      value = g.value;
      bound = g.truncation_bound;
    } else {
      if (!law) throw std::invalid_argument("--quantity G needs a modulation law");
      const double tol = std::min(m.eps, 1e-10);
      value = modulated_G(x_arg, *law, tol);
      bound = tol * value;
    }
    body << format_double(x_arg) << "," << format_double(value) << "," << format_double(bound)
         << "\n";
  } else {
    for (double lambda : lambda_values(m, grid_spec)) {
      CityConfig c = m.city();
      c.lambda = lambda;
      HarmonicEval e;
      if (quantity == "mean") {
        e = law ? modulated_mean_distance(c, *law, m.eps) : mean_distance_analytic(c, m.eps);
      } else if (quantity == "variance") {
        if (law) throw std::invalid_argument("variance does not support modulation");
        e = variance_analytic(c, m.eps);
      } else if (quantity == "turns-mean") {
        if (law) throw std::invalid_argument("turns-mean does not support modulation");
        e = mean_turn_deficit(c.rho(), c.alpha(), m.eps);
      } else {
        throw std::invalid_argument("unknown --quantity: " + quantity);
      }
      body << format_double(lambda) << "," << format_double(e.value) << ","
           << format_double(e.truncation_bound) << "\n";
    }
  }

  std::ofstream file;
  std::ostream& os = out_path.empty() ? std::cout : (file.open(out_path), file);
  write_manifest(os, "analytic", m, "quantity=" + quantity);
  os << body.str();
  return kExitOk;
}

// ----------------------------------------------------------------------
// simulate

int run_simulate(const ModelFlags& m, std::size_t reps, const std::string& terminal,
                 const std::string& network_in, const std::string& dump_network,
                 const std::string& network_variant, const std::string& walk,
                 const std::string& out_path) {
  CityConfig c = m.city();
  const TerminalRule rule =
      terminal == "persist" ? TerminalRule::PersistLevelZero : TerminalRule::FormulaFaithful;
  const auto law = parse_modulation(m.modulation, m.beta, m.theta);

  std::vector<CompactOutcome> outcomes;
  MonteCarloSummary summary;
  if (m.strategy == "network") {
    if (law) throw std::invalid_argument("network strategy does not support modulation");
    std::optional<StreetNetwork> fixed;
    if (!network_in.empty()) {
      std::ifstream nf(network_in);
      if (!nf) throw std::runtime_error("cannot open network file: " + network_in);
      fixed = read_network(nf);
    } else if (!dump_network.empty()) {
      Xoshiro256pp rng = RngStream{m.seed, 0x6e65747764756d70ULL}.engine();
      fixed = network_variant == "deterministic" ? generate_deterministic_network(c)
                                                 : generate_poisson_network(c, rng);
      fixed->seed = m.seed;
      std::ofstream nf(dump_network);
      if (!nf) throw std::runtime_error("cannot open network dump path: " + dump_network);
      write_network(nf, *fixed);
    }
    const Strategy walk_strategy =
        walk == "jumpover" ? Strategy::JumpOver : Strategy::Jumpless;
    summary = monte_carlo_network(c, walk_strategy, reps, m.seed, fixed ? &*fixed : nullptr,
                                  m.threads, &outcomes);
  } else {
    const Strategy strategy =
        m.strategy == "jumpover" ? Strategy::JumpOver : Strategy::Jumpless;
    if (m.strategy != "jumpless" && m.strategy != "jumpover") {
      throw std::invalid_argument("unknown --strategy: " + m.strategy);
    }
    summary = monte_carlo(c, strategy, law, reps, m.seed, rule, m.threads, &outcomes);
  }

  std::ofstream file;
  std::ostream& os = out_path.empty() ? std::cout : (file.open(out_path), file);
  std::ostringstream extra;
  extra << "strategy=" << m.strategy << " terminal=" << terminal << " reps=" << reps;
  write_manifest(os, "simulate", m, extra.str());
  os << "# schema: outcome-v1 rep,distance,turns,parked,levels_visited\n";
  os << "rep,distance,turns,parked,levels_visited\n";
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const CompactOutcome& o = outcomes[r];
    os << r << "," << format_double(o.distance) << "," << o.turns << ","
       << (o.parked ? 1 : 0) << "," << o.levels_visited << "\n";
  }
  os << "# summary: mean=" << format_double(summary.mean)
     << " variance=" << format_double(summary.variance)
     << " se=" << format_double(summary.se_mean)
     << " parked_rate=" << format_double(summary.parked_rate)
     << " mean_deficit=" << format_double(summary.mean_deficit) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------------
// verify

int run_verify(const ModelFlags& m, const std::string& suite, const std::string& preset_name,
               bool json_stdout, const std::string& out_path) {
  const VerifyPreset preset = verify_preset(preset_name);
  VerifyOptions opts;
  opts.reps = preset.reps;
  opts.master_seed = m.seed;
  opts.threads = m.threads;
  CityConfig cfg = m.city();
  if (cfg.infinite_depth()) cfg.k_max = 25;
  const LambdaGrid grid{1e3, 1.0 / cfg.alpha(), preset.grid_points};

  std::vector<VerificationReport> reports;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };
  if (want("mean")) reports.push_back(verify_mean_theorem(cfg, grid, opts));
  if (want("variance")) reports.push_back(verify_variance_theorem(cfg, grid, opts));
  if (want("turns")) reports.push_back(verify_turns_theorem(cfg, preset.turns_decades, opts));
  if (want("jumpover")) reports.push_back(verify_jumpover(cfg, grid, opts));
  if (want("modulation")) {
    const std::vector<ModulationLaw> laws{ModulationLaw::gamma(0.5, 2.0),
                                          ModulationLaw::gamma(2.0, 0.5)};
    reports.push_back(verify_modulation_theorem(cfg, laws, grid, opts));
  }
  if (reports.empty()) throw std::invalid_argument("unknown --suite: " + suite);

  bool all_ok = true;
  std::ostringstream json;
  json << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    all_ok = all_ok && reports[i].all_pass();
    if (!json_stdout) std::cout << reports[i].to_text() << "\n";
    json << reports[i].to_json_string() << (i + 1 < reports.size() ? ",\n" : "\n");
  }
  json << "]\n";
  if (json_stdout) std::cout << json.str();
  if (!out_path.empty()) {
    std::ofstream jf(out_path);
    if (!jf) throw std::runtime_error("cannot open report path: " + out_path);
    jf << json.str();
  }
  return all_ok ? kExitOk : kExitVerifyFailed;
}

// ----------------------------------------------------------------------
// profile

int run_profile(const ModelFlags& m, double x0, int samples, const std::string& out_path) {
  CityConfig cfg = m.city();
  cfg.k_max = kInfiniteDepth;
  const LogPeriodicProfile prof = log_periodic_profile(cfg, x0, samples);

  std::ofstream file;
  std::ostream& os = out_path.empty() ? std::cout : (file.open(out_path), file);
  std::ostringstream extra;
  extra << "x0=" << format_double(x0) << " samples=" << samples
        << " prefactor=" << format_double(prof.prefactor)
        << " period=" << format_double(prof.period);
  write_manifest(os, "profile", m, extra.str());
  os << "# schema: profile-v1 log_x_mod_period,relative_oscillation\n";
  os << "log_x_mod_period,relative_oscillation\n";
  for (std::size_t i = 0; i < prof.oscillation.size(); ++i) {
    os << format_double(prof.log_x_mod_period[i]) << ","
       << format_double(prof.oscillation[i]) << "\n";
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperfractal Manhattan parking-search model: analytics, simulation, and "
               "theorem verification"};
  app.require_subcommand(1);

  ModelFlags m_analytic, m_simulate, m_verify, m_profile;

  auto* analytic = app.add_subcommand("analytic", "evaluate closed-form quantities to CSV");
  std::string quantity = "mean", grid_spec, analytic_out;
  double x_arg = 0.0;
  add_model_flags(analytic, &m_analytic, false);
  analytic->add_option("--quantity", quantity, "mean | variance | turns-mean | g | G");
  analytic->add_option("--lambda-grid", grid_spec, "geometric grid start:ratio:count");
  analytic->add_option("--x", x_arg, "argument for g / G");
  analytic->add_option("-o,--out", analytic_out, "output CSV path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo search runs to CSV");
  std::size_t reps = 10000;
  std::string terminal = "formula", network_in, dump_network, network_variant = "poisson",
              walk = "jumpless", simulate_out;
  add_model_flags(simulate, &m_simulate, true);
  simulate->add_option("--reps", reps, "number of replications");
  simulate->add_option("--terminal", terminal, "formula | persist");
  simulate->add_option("--network-in", network_in, "walk a fixed network from file");
  simulate->add_option("--dump-network", dump_network, "generate one network, save, and use");
  simulate->add_option("--network-variant", network_variant, "poisson | deterministic");
  simulate->add_option("--walk", walk, "turn rule on networks: jumpless | jumpover");
  simulate->add_option("-o,--out", simulate_out, "output CSV path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run theorem verification suites");
  std::string suite = "all", preset = "small", verify_out;
  bool json_stdout = false;
  add_model_flags(verify, &m_verify, false);
  verify->add_option("--suite", suite, "mean | variance | turns | jumpover | modulation | all");
  verify->add_option("--preset", preset, "small | medium | large");
  verify->add_flag("--json", json_stdout, "print JSON instead of text");
  verify->add_option("-o,--out", verify_out, "also write the JSON report here");

  auto* profile = app.add_subcommand("profile", "sample the log-periodic fluctuation");
  double x0 = 1e6;
  int samples = 64;
  std::string profile_out;
  add_model_flags(profile, &m_profile, false);
  profile->add_option("--x0", x0, "anchor point (scaled intensity)");
  profile->add_option("--samples", samples, "samples across one period");
  profile->add_option("-o,--out", profile_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (analytic->parsed()) {
      apply_config_file(*analytic, &m_analytic);
      apply_seed_env(*analytic, &m_analytic);
      return run_analytic(m_analytic, quantity, grid_spec, x_arg, analytic_out);
    }
    if (simulate->parsed()) {
      apply_config_file(*simulate, &m_simulate);
      apply_seed_env(*simulate, &m_simulate);
      return run_simulate(m_simulate, reps, terminal, network_in, dump_network,
                          network_variant, walk, simulate_out);
    }
    if (verify->parsed()) {
      apply_config_file(*verify, &m_verify);
      apply_seed_env(*verify, &m_verify);
      return run_verify(m_verify, suite, preset, json_stdout, verify_out);
    }
    if (profile->parsed()) {
      apply_config_file(*profile, &m_profile);
      apply_seed_env(*profile, &m_profile);
      return run_profile(m_profile, x0, samples, profile_out);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
