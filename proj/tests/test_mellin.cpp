#include <doctest.h>

#include <cmath>
#include <complex>

#include "hyperpark/experiments.hpp"
#include "hyperpark/harmonic.hpp"
#include "hyperpark/mellin.hpp"
#include "hyperpark/quadrature.hpp"

using namespace hyperpark;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_CASE("mellin transform of log(1+x): closed form and symmetry") {
  CHECK(mellin_log1p(-0.5).real() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(mellin_log1p(0.5), std::invalid_argument);
  CHECK_THROWS_AS(mellin_log1p(-1.5), std::invalid_argument);

  const std::complex<double> s{-0.4, 1.3};
  const std::complex<double> a = mellin_log1p(std::conj(s));
  const std::complex<double> b = std::conj(mellin_log1p(s));
  CHECK(std::abs(a - b) < 1e-13);
}

TEST_CASE("mellin_log1p against direct quadrature at s = -0.3") {
  // After x = e^t the integrand log(1+e^t) e^{st} decays exponentially at
  // both ends of the line.
  const double s = -0.3;
  auto f = [&](double t) { return std::log1p(std::exp(t)) * std::exp(s * t); };
  const QuadResult q = refined_trapezoid(f, -55.0, 130.0, 1e-11, 16, 0.5);
  CHECK(q.converged);
  CHECK(mellin_log1p(s).real() == doctest::Approx(q.value).epsilon(1e-8));
}

TEST_CASE("g* converges across meshes and obeys the scaling identity") {
  const double alpha = 0.125;
  const MellinValue g1 = mellin_g_star(1.0, alpha, 1e-10);
  // Independent evaluation: coarser initial mesh, wider window.
  auto integrand = [&](double t) -> std::complex<double> {
    return g_product(std::exp(t), alpha, 1e-15).value * std::exp(t);
  };
  const ComplexQuadResult direct = refined_trapezoid_complex(integrand, -50.0, 14.0, 1e-12, 16, 0.8);
  CHECK(std::abs(g1.value - direct.value) < 1e-8 * std::abs(direct.value));
  CHECK(g1.quad_error < 1e-6);

  // M[g(alpha x)](s) = alpha^{-s} g*(s).
  const std::complex<double> s{0.7, 0.4};
  const MellinValue gs = mellin_g_star(s, alpha, 1e-10);
  auto scaled = [&](double t) -> std::complex<double> {
    return g_product(alpha * std::exp(t), alpha, 1e-15).value * std::exp(s * t);
  };
  const ComplexQuadResult m_scaled = refined_trapezoid_complex(scaled, -80.0, 18.0, 1e-12, 16, 0.5);
  const std::complex<double> expected = std::pow(alpha, -s) * gs.value;
  CHECK(std::abs(m_scaled.value - expected) < 1e-7 * std::abs(expected));
}

TEST_CASE("asymptotic constants for p = 1/2") {
  CityConfig cfg{0.5, 1.0, 1.0, kInfiniteDepth};
  const AsymptoticEstimate est = asymptotic_mean_constant(cfg);
  CHECK(est.exponent == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(est.period == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(est.prefactor > 0.0);
  CHECK(est.oscillation_amplitude > 0.0);
  CHECK(est.oscillation_amplitude < est.prefactor);

  // Median of f(x) x^{1/3} over one period agrees within the oscillation.
  std::vector<double> vals;
  for (int i = 0; i < 32; ++i) {
    const double x = 1e6 * std::exp(est.period * i / 32);
    vals.push_back(mean_of_scale(cfg, x, 1e-13) * std::cbrt(x));
  }
  std::sort(vals.begin(), vals.end());
  const double median = 0.5 * (vals[15] + vals[16]);
  CHECK(std::abs(median - est.prefactor) <= est.oscillation_amplitude + est.quad_error);
}

TEST_CASE("slope of log f is -1/d_F regardless of L") {
  for (double L : {1.0, 3.7}) {
    CityConfig cfg{0.5, L, 1.0, kInfiniteDepth};
    std::vector<std::pair<double, double>> pts;
    for (double x = 1e5; pts.size() < 7; x *= 8.0) {
      pts.emplace_back(x, mean_of_scale(cfg, x, 1e-13));
    }
    const ExponentFit fit = fit_scaling_exponent(pts, true, cfg.alpha());
    CHECK(fit.slope == doctest::Approx(-1.0 / 3.0).epsilon(0.02));
  }
}

TEST_CASE("log-periodic profile: periodicity and zero mean") {
  CityConfig cfg{0.5, 1.0, 1.0, kInfiniteDepth};
  const int n = 48;
  const LogPeriodicProfile a = log_periodic_profile(cfg, 1e6, n);
  const LogPeriodicProfile b = log_periodic_profile(cfg, 1e6 / cfg.alpha(), n);
  REQUIRE(a.oscillation.size() == static_cast<std::size_t>(n));
  double max_gap = 0.0;
  for (int i = 0; i < n; ++i) {
    max_gap = std::max(max_gap, std::abs(a.oscillation[static_cast<std::size_t>(i)] -
                                         b.oscillation[static_cast<std::size_t>(i)]));
  }
  CHECK(max_gap < 1e-6);
  CHECK(a.amplitude > 0.0);
  CHECK(std::abs(a.mean) < 0.1 * a.amplitude);
  CHECK(a.amplitude < 1.0); // relative oscillation well below the prefactor
}

TEST_CASE("jump-over transform: normalization, poles, regularity, truncation") {
  const double alpha = 0.125;
  const double d_f = 3.0;

  // Residue-at-zero convention: s j*(s) -> 1.
  const std::complex<double> near0 = jumpover_jstar(1e-6, alpha, 80).value * 1e-6;
  CHECK(std::abs(near0 - 1.0) < 1e-4);

  // Blow-up toward s = 1 + 1/d_F.
  const double pole = 1.0 + 1.0 / d_f;
  const double far = std::abs(jumpover_jstar(pole - 0.1, alpha, 60).value);
  const double mid = std::abs(jumpover_jstar(pole - 0.01, alpha, 60).value);
  const double near = std::abs(jumpover_jstar(pole - 0.001, alpha, 60).value);
  CHECK(far < mid);
  CHECK(mid < near);
  CHECK(near > 50.0 * far);

  // Finite and continuous at s = 1 (the sin pole cancels).
  const double at1 = std::abs(jumpover_jstar(1.0, alpha, 60).value);
  CHECK(std::isfinite(at1));
  const double near1 = std::abs(jumpover_jstar(1.0 + 1e-6, alpha, 60).value);
  CHECK(near1 / at1 == doctest::Approx(1.0).epsilon(1e-3));

  // Truncation stability.
  const std::complex<double> t40 = jumpover_jstar(0.5, alpha, 40).value;
  const std::complex<double> t80 = jumpover_jstar(0.5, alpha, 80).value;
  CHECK(std::abs(t40 - t80) < 1e-10 * std::abs(t80));

  // Landing on the pole itself is reported, not returned as garbage.
  CHECK_THROWS_AS(jumpover_jstar(pole, alpha, 60), NumericError);
  CHECK_THROWS_AS(jumpover_jstar(0.5, 1.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(jumpover_jstar(0.5, alpha, 0), std::invalid_argument);
}
