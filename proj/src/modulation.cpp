#include "hyperpark/modulation.hpp"

#include <cmath>
#include <sstream>

#include "hyperpark/numeric.hpp"
#include "hyperpark/quadrature.hpp"

namespace hyperpark {

void ModulationLaw::validate() const {
  switch (kind) {
    case Kind::Constant:
      if (!(a > 0.0)) throw std::invalid_argument("ModulationLaw: constant weight must be > 0");
      break;
    case Kind::Gamma:
      if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("ModulationLaw: gamma shape and scale must be > 0");
      }
      break;
    case Kind::LogNormal:
      if (!std::isfinite(a) || !(b > 0.0)) {
        throw std::invalid_argument("ModulationLaw: lognormal needs finite mu and sigma > 0");
      }
      break;
  }
}

double ModulationLaw::mean() const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Gamma: return a * b;
    case Kind::LogNormal: return std::exp(a + 0.5 * b * b);
  }
  return 0.0;
}

double ModulationLaw::second_moment() const {
  switch (kind) {
    case Kind::Constant: return a * a;
    case Kind::Gamma: return a * (a + 1.0) * b * b;
    case Kind::LogNormal: return std::exp(2.0 * a + 2.0 * b * b);
  }
  return 0.0;
}

double ModulationLaw::sample(Xoshiro256pp& rng) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Gamma: return rng.gamma(a, b);
    case Kind::LogNormal: return rng.lognormal(a, b);
  }
  return 1.0;
}

std::string ModulationLaw::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant: os << "constant:" << a; break;
    case Kind::Gamma: os << "gamma:" << a << ":" << b; break;
    case Kind::LogNormal: os << "lognormal:" << a << ":" << b; break;
  }
  return os.str();
}

namespace {

// Integrate h over [lo,hi] with the split point inserted when interior;
// both pieces must converge to rel_tol. Pieces run under tanh-sinh, which
// keeps spectral convergence at the interior split point.
template <typename F>
QuadResult split_integral(F&& h, double lo, double hi, double split, double rel_tol) {
  QuadResult total;
  total.converged = true;
  total.abs_error = 0.0;
  auto run = [&](double a, double b) {
    if (b - a < 1e-12) return;
    const QuadResult r = tanh_sinh(h, a, b, rel_tol, 12);
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  };
  if (split > lo && split < hi) {
    run(lo, split);
    run(split, hi);
  } else {
    run(lo, hi);
  }
  return total;
}

double gamma_G(double u, double shape, double scale, double eps) {
  // Lower bound via Jensen fixes the absolute scale of the cutoffs.
  const double g_lb = 1.0 / (1.0 + u * shape * scale);
  const double eps_abs = 0.1 * eps * g_lb;
  const double log_norm = std::lgamma(shape) + shape * std::log(scale);

  // Left cutoff: P(W <= T) <= T^shape / (Gamma(shape+1) scale^shape).
  const double log_T_left =
      (std::log(eps_abs) + std::lgamma(shape + 1.0) + shape * std::log(scale)) / shape;
  // Right cutoff from the Chernoff bound P(W > T) <= 2^shape e^{-T/(2 scale)}.
  const double t_right = 2.0 * scale * (shape * std::log(2.0) - std::log(eps_abs));
  const double lo = log_T_left;
  const double hi = std::log(t_right);

  auto h = [&](double v) {
    const double t = std::exp(v);
    return std::exp(shape * v - t / scale - log_norm) / (1.0 + u * t);
  };
  const QuadResult r = split_integral(h, lo, hi, -std::log(u), 0.2 * eps);
  if (!r.converged || r.abs_error > eps * r.value) {
    throw NumericError("modulated_G: gamma quadrature did not reach requested error",
                       r.value > 0.0 ? r.abs_error / r.value : r.abs_error);
  }
  return r.value;
}

double lognormal_G(double u, double mu, double sigma, double eps) {
  // W = exp(mu + sigma Z); integrate against the standard normal density.
  const double z_max = 9.5; // phi tail ~ 1e-21, far below any eps we accept
  auto h = [&](double z) {
    return 0.3989422804014327 * std::exp(-0.5 * z * z) /
           (1.0 + u * std::exp(mu + sigma * z));
  };
  const double z_split = (-std::log(u) - mu) / sigma;
  const QuadResult r = split_integral(h, -z_max, z_max, z_split, 0.2 * eps);
  if (!r.converged || r.abs_error > eps * r.value) {
    throw NumericError("modulated_G: lognormal quadrature did not reach requested error",
                       r.value > 0.0 ? r.abs_error / r.value : r.abs_error);
  }
  return r.value;
}

} // namespace

double modulated_G(double u, const ModulationLaw& law, double eps) {
  law.validate();
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw std::invalid_argument("modulated_G: u must be nonnegative and finite");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("modulated_G: eps must be > 0");
  if (u == 0.0) return 1.0;
  switch (law.kind) {
    case ModulationLaw::Kind::Constant: return 1.0 / (1.0 + u * law.a);
    case ModulationLaw::Kind::Gamma: return gamma_G(u, law.a, law.b, eps);
    case ModulationLaw::Kind::LogNormal: return lognormal_G(u, law.a, law.b, eps);
  }
  return 1.0;
}

HarmonicEval modulated_mean_distance(const CityConfig& cfg, const ModulationLaw& law,
                                     double eps) {
  cfg.validate();
  law.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("modulated_mean_distance: eps must be > 0");

  const double x = cfg.mean_scale();
  const double alpha = cfg.alpha();
  const double w_mean = law.mean();
  const double w_m2 = law.second_moment();
  const double g_eps = std::min(1e-11, 0.01 * eps);

  if (x == 0.0) return HarmonicEval{cfg.L, 0.0, 0};

  // Depth after which all remaining G factors are within eps of their
  // linear expansion; 1 - G(v) <= v E[W].
  int j_cut = 1;
  while (x * w_mean * std::pow(alpha, j_cut + 1) / (1.0 - alpha) > 0.25 * eps &&
         j_cut < 4000) {
    ++j_cut;
  }
  const double product_tail = x * w_mean * std::pow(alpha, j_cut + 1) / (1.0 - alpha);

  std::vector<double> g_vals(static_cast<std::size_t>(j_cut) + 1, 1.0);
  double quad_err = 0.0;
  for (int j = 1; j <= j_cut; ++j) {
    const double v = x * std::pow(alpha, j);
    // |G(v) - (1 - v E[W])| <= v^2 E[W^2]
    if (v * v * w_m2 < 1e-18 && v * w_mean < 0.5) {
      g_vals[static_cast<std::size_t>(j)] = 1.0 - v * w_mean;
      quad_err += v * v * w_m2;
    } else {
      g_vals[static_cast<std::size_t>(j)] = modulated_G(v, law, g_eps);
      quad_err += g_eps;
    }
  }

  // Suffix products Pi_k = prod_{j=k+1..j_cut} G_j.
  std::vector<double> suffix(static_cast<std::size_t>(j_cut) + 2, 1.0);
  for (int j = j_cut; j >= 1; --j) {
    suffix[static_cast<std::size_t>(j)] =
        suffix[static_cast<std::size_t>(j) + 1] * g_vals[static_cast<std::size_t>(j)];
  }

  CompensatedSum sum;
  int k = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (k + 1 < j_cut && (k < 2 || residual > 0.25 * eps * cfg.L)) {
    ++k;
    sum.add(std::ldexp(cfg.L, -k) * suffix[static_cast<std::size_t>(k) + 1]);
    residual = std::ldexp(cfg.L, -k) *
               std::min(1.0, x * w_mean * std::pow(alpha, k + 2) / (1.0 - alpha));
  }
  // Tail estimate: between L 2^-k * Pi_{k+1} and L 2^-k.
  const double pi_next = suffix[static_cast<std::size_t>(k) + 2];
  sum.add(std::ldexp(cfg.L, -k) * pi_next);
  const double bound = std::ldexp(cfg.L, -k) * (1.0 - pi_next) +
                       cfg.L * (quad_err + product_tail) + 4e-16 * cfg.L;
  return HarmonicEval{sum.value(), bound, k};
}

} // namespace hyperpark
