#include "hyperpark/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hyperpark/harmonic.hpp"
#include "hyperpark/mellin.hpp"
#include "hyperpark/numeric.hpp"

namespace hyperpark {

ExponentFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points,
                                 bool period_aligned, double alpha) {
  if (points.size() < 4) {
    throw std::invalid_argument("fit_scaling_exponent: need at least 4 points");
  }
  std::vector<double> lx, ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (const auto& [lambda, value] : points) {
    if (!(lambda > 0.0) || !(value > 0.0)) {
      throw std::invalid_argument("fit_scaling_exponent: points must be positive");
    }
    lx.push_back(std::log(lambda));
    ly.push_back(std::log(value));
  }
  if (period_aligned) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("fit_scaling_exponent: period alignment needs alpha");
    }
    const double want = -std::log(alpha);
    for (std::size_t i = 1; i < lx.size(); ++i) {
      if (std::abs((lx[i] - lx[i - 1]) - want) > 1e-9 * want) {
        throw std::invalid_argument(
            "fit_scaling_exponent: period-aligned grid must have ratio 1/alpha");
      }
    }
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_scaling_exponent: degenerate grid");

  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  double r_lo = std::numeric_limits<double>::infinity();
  double r_hi = -r_lo;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.residual_amplitude = 0.5 * (r_hi - r_lo);
  const double dof = n > 2.0 ? n - 2.0 : 1.0;
  const double sigma2 = ss_res / dof;
  fit.se_slope = std::sqrt(sigma2 / sxx);
  fit.se_intercept = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
  for (const auto& [lambda, value] : points) {
    (void)value;
    fit.grid.push_back(lambda);
  }
  return fit;
}

std::vector<double> LambdaGrid::values() const {
  if (count < 1) throw std::invalid_argument("LambdaGrid: count must be >= 1");
  if (!(anchor > 0.0) || !(ratio > 0.0)) {
    throw std::invalid_argument("LambdaGrid: anchor and ratio must be > 0");
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  double x = anchor;
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] = x;
    x *= ratio;
  }
  return v;
}

bool VerificationReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "suite: " << suite << "  seed: " << master_seed << "\n";
  std::size_t width = 8;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    os << (c.pass ? "[pass] " : "[FAIL] ") << std::left << std::setw(static_cast<int>(width))
       << c.name << std::right << "  observed=" << std::setprecision(8) << c.observed
       << "  reference=" << c.reference << "  tol=" << c.tolerance << "\n";
  }
  os << (all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
  return os.str();
}

std::string VerificationReport::to_json_string() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["master_seed"] = master_seed;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"observed", c.observed},
                           {"reference", c.reference},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
  }
  return j.dump(2);
}

VerifyPreset verify_preset(const std::string& name) {
  if (name == "small") return VerifyPreset{"small", 20000, 5, 4};
  if (name == "medium") return VerifyPreset{"medium", 100000, 7, 4};
  if (name == "large") return VerifyPreset{"large", 400000, 9, 5};
  throw std::invalid_argument("verify_preset: unknown preset '" + name + "'");
}

namespace {

CheckResult within(const std::string& name, double observed, double reference,
                   double tolerance) {
  return CheckResult{name, observed, reference, tolerance,
                     std::abs(observed - reference) <= tolerance};
}

CheckResult at_most(const std::string& name, double observed, double limit) {
  return CheckResult{name, observed, limit, limit, observed <= limit};
}

std::string lam_tag(double lambda) {
  std::ostringstream os;
  os << "lambda=" << std::setprecision(4) << lambda;
  return os.str();
}

} // namespace

VerificationReport verify_mean_theorem(const CityConfig& cfg, const LambdaGrid& grid,
                                       const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "mean";
  rep.master_seed = opts.master_seed;
  const double target = -1.0 / cfg.dimension();

  std::vector<std::pair<double, double>> analytic_pts, mc_pts;
  std::uint64_t stream = 0;
  for (double lambda : grid.values()) {
    CityConfig c = cfg;
    c.lambda = lambda;
    const double f = mean_distance_analytic(c).value;
    const MonteCarloSummary mc = monte_carlo(c, Strategy::Jumpless, std::nullopt, opts.reps,
                                             opts.master_seed + stream++,
                                             TerminalRule::FormulaFaithful, opts.threads);
    analytic_pts.emplace_back(lambda, f);
    mc_pts.emplace_back(lambda, mc.mean);
    rep.checks.push_back(within("mc vs analytic mean, " + lam_tag(lambda), mc.mean, f,
                                3.0 * mc.se_mean));
  }
  const bool aligned = std::abs(grid.ratio - 1.0 / cfg.alpha()) < 1e-12 * grid.ratio;
  const ExponentFit fa = fit_scaling_exponent(analytic_pts, aligned, cfg.alpha());
  const ExponentFit fm = fit_scaling_exponent(mc_pts, aligned, cfg.alpha());
  rep.checks.push_back(within("analytic mean slope", fa.slope, target, 0.02));
  rep.checks.push_back(within("mc mean slope", fm.slope, target, 0.05));
  return rep;
}

VerificationReport verify_variance_theorem(const CityConfig& cfg, const LambdaGrid& grid,
                                           const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "variance";
  rep.master_seed = opts.master_seed;
  const double target = -2.0 / cfg.dimension();

  std::vector<std::pair<double, double>> analytic_pts, mc_pts;
  std::uint64_t stream = 1000;
  for (double lambda : grid.values()) {
    CityConfig c = cfg;
    c.lambda = lambda;
    const double v = variance_analytic(c).value;
    const MonteCarloSummary mc = monte_carlo(c, Strategy::Jumpless, std::nullopt, opts.reps,
                                             opts.master_seed + stream++,
                                             TerminalRule::FormulaFaithful, opts.threads);
    analytic_pts.emplace_back(lambda, v);
    mc_pts.emplace_back(lambda, mc.variance);
    rep.checks.push_back(within("mc vs analytic variance, " + lam_tag(lambda), mc.variance, v,
                                3.0 * mc.se_variance));
  }
  const bool aligned = std::abs(grid.ratio - 1.0 / cfg.alpha()) < 1e-12 * grid.ratio;
  const ExponentFit fa = fit_scaling_exponent(analytic_pts, aligned, cfg.alpha());
  const ExponentFit fm = fit_scaling_exponent(mc_pts, aligned, cfg.alpha());
  rep.checks.push_back(within("analytic variance slope", fa.slope, target, 0.05));
  rep.checks.push_back(within("mc variance slope", fm.slope, target, 0.10));
  return rep;
}

VerificationReport verify_turns_theorem(const CityConfig& cfg, int decades,
                                        const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "turns";
  rep.master_seed = opts.master_seed;
  const double d_f = cfg.dimension();

  double lo_a = std::numeric_limits<double>::infinity(), hi_a = -lo_a;
  double lo_e = lo_a, hi_e = -lo_a;
  std::uint64_t stream = 2000;
  for (int dec = 0; dec <= decades; ++dec) {
    const double lambda = 10.0 * std::pow(10.0, dec);
    CityConfig c = cfg;
    c.lambda = lambda;
    const double x = c.rho();
    const double analytic = mean_turn_deficit(x, c.alpha()).value;
    const MonteCarloSummary mc = monte_carlo(c, Strategy::Jumpless, std::nullopt, opts.reps,
                                             opts.master_seed + stream++,
                                             TerminalRule::FormulaFaithful, opts.threads);
    const double centered_a = analytic - std::log2(lambda) / d_f;
    const double centered_e = mc.mean_deficit - std::log2(lambda) / d_f;
    lo_a = std::min(lo_a, centered_a);
    hi_a = std::max(hi_a, centered_a);
    lo_e = std::min(lo_e, centered_e);
    hi_e = std::max(hi_e, centered_e);
    rep.checks.push_back(within("mc vs analytic deficit, " + lam_tag(lambda),
                                mc.mean_deficit, analytic, 3.0 * mc.se_deficit + 1e-9));

    // PGF slope at u = 1 against the histogram mean.
    const double h = 1e-5;
    const double pgf_mean = (turns_pgf(x, 1.0 + h, c.alpha()).real() -
                             turns_pgf(x, 1.0 - h, c.alpha()).real()) /
                            (2.0 * h);
    rep.checks.push_back(within("pgf mean vs histogram, " + lam_tag(lambda), pgf_mean,
                                mc.mean_deficit, 3.0 * mc.se_deficit + 1e-6));
  }
  rep.checks.push_back(at_most("analytic deficit band width", hi_a - lo_a, 2.0));
  rep.checks.push_back(at_most("empirical deficit band width", hi_e - lo_e, 2.0));
  return rep;
}

VerificationReport verify_modulation_theorem(const CityConfig& cfg,
                                             const std::vector<ModulationLaw>& laws,
                                             const LambdaGrid& grid,
                                             const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "modulation";
  rep.master_seed = opts.master_seed;
  const double target = -1.0 / cfg.dimension();
  const bool aligned = std::abs(grid.ratio - 1.0 / cfg.alpha()) < 1e-12 * grid.ratio;

  std::vector<ExponentFit> fits;
  std::uint64_t stream = 3000;
  for (const auto& law : laws) {
    std::vector<std::pair<double, double>> mc_pts;
    for (double lambda : grid.values()) {
      CityConfig c = cfg;
      c.lambda = lambda;
      const MonteCarloSummary mc =
          monte_carlo(c, Strategy::Jumpless, law, opts.reps, opts.master_seed + stream++,
                      TerminalRule::FormulaFaithful, opts.threads);
      mc_pts.emplace_back(lambda, mc.mean);
      const double analytic = modulated_mean_distance(c, law).value;
      rep.checks.push_back(within("mc vs analytic [" + law.describe() + "], " + lam_tag(lambda),
                                  mc.mean, analytic, 3.0 * mc.se_mean));
    }
    const ExponentFit fit = fit_scaling_exponent(mc_pts, aligned, cfg.alpha());
    rep.checks.push_back(
        within("mc slope [" + law.describe() + "]", fit.slope, target, 0.05));
    fits.push_back(fit);
  }
  for (std::size_t i = 0; i + 1 < fits.size(); ++i) {
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      const double gap = std::abs(fits[i].intercept - fits[j].intercept);
      const double noise = 3.0 * std::sqrt(fits[i].se_intercept * fits[i].se_intercept +
                                           fits[j].se_intercept * fits[j].se_intercept);
      rep.checks.push_back(CheckResult{"intercepts distinct [" + laws[i].describe() + " vs " +
                                           laws[j].describe() + "]",
                                       gap, noise, noise, gap > noise});
    }
  }
  return rep;
}

VerificationReport verify_jumpover(const CityConfig& cfg, const LambdaGrid& grid,
                                   const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "jumpover";
  rep.master_seed = opts.master_seed;
  const double d_f = cfg.dimension();
  const double target = -1.0 / d_f;
  const bool aligned = std::abs(grid.ratio - 1.0 / cfg.alpha()) < 1e-12 * grid.ratio;

  std::vector<std::pair<double, double>> jump_pts;
  std::uint64_t stream = 4000;
  for (double lambda : grid.values()) {
    CityConfig c = cfg;
    c.lambda = lambda;
    const MonteCarloSummary mj =
        monte_carlo(c, Strategy::JumpOver, std::nullopt, opts.reps,
                    opts.master_seed + stream++, TerminalRule::FormulaFaithful, opts.threads);
    const MonteCarloSummary ml =
        monte_carlo(c, Strategy::Jumpless, std::nullopt, opts.reps,
                    opts.master_seed + stream++, TerminalRule::FormulaFaithful, opts.threads);
    jump_pts.emplace_back(lambda, mj.mean);
    const double headroom = 3.0 * std::sqrt(mj.se_mean * mj.se_mean + ml.se_mean * ml.se_mean);
    rep.checks.push_back(at_most("dominance jumpover<=jumpless, " + lam_tag(lambda),
                                 mj.mean - ml.mean, headroom));
  }
  const ExponentFit fit = fit_scaling_exponent(jump_pts, aligned, cfg.alpha());
  rep.checks.push_back(within("jumpover mc slope", fit.slope, target, 0.05));

  // Transform checks: blow-up toward the pole at 1 + 1/d_F, regularity at 1.
  const double pole = 1.0 + 1.0 / d_f;
  const double j_far = std::abs(jumpover_jstar(pole - 0.1, cfg.alpha(), 60).value);
  const double j_mid = std::abs(jumpover_jstar(pole - 0.01, cfg.alpha(), 60).value);
  const double j_near = std::abs(jumpover_jstar(pole - 0.001, cfg.alpha(), 60).value);
  rep.checks.push_back(CheckResult{"jstar grows toward pole", j_near / j_far, 10.0, 10.0,
                                   j_near > j_mid && j_mid > j_far && j_near > 10.0 * j_far});
  const double j_at_1 = std::abs(jumpover_jstar(1.0, cfg.alpha(), 60).value);
  const double j_near_1 = std::abs(jumpover_jstar(1.0 + 1e-6, cfg.alpha(), 60).value);
  rep.checks.push_back(within("jstar finite at s=1", j_near_1 / j_at_1, 1.0, 1e-3));
  return rep;
}

} // namespace hyperpark
