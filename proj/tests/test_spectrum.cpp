#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfdfa/spectrum.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/time_series.hpp"

using namespace mfdfa;

namespace {

HurstSpectrum spectrum_from_tau(const std::vector<double>& q,
                                const std::vector<double>& tau) {
  HurstSpectrum hs;
  hs.q_values = q;
  hs.tau = tau;
  hs.h.resize(q.size());
  hs.h_se.assign(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    hs.h[i] = (q[i] != 0.0) ? (tau[i] + 1.0) / q[i] : 0.0;
  hs.fit_range = {8, 128};
  return hs;
}

std::vector<double> q_range(double lo, double hi, double step) {
  std::vector<double> q;
  for (double v = lo; v <= hi + 1e-9; v += step) q.push_back(v);
  return q;
}

SingularitySpectrum sample_spectrum(const std::vector<double>& alpha,
                                    const std::vector<double>& f) {
  SingularitySpectrum spec;
  spec.alpha = alpha;
  spec.f = f;
  spec.source_q.resize(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i)
    spec.source_q[i] = static_cast<double>(alpha.size()) - static_cast<double>(i);
  spec.flagged.assign(alpha.size(), false);
  return spec;
}

double cascade_tau(double a, double q) {
  const double b = 1.0 - a;
  return -std::log(std::pow(a, q) + std::pow(b, q)) / std::log(2.0);
}

}  // namespace

TEST_CASE("legendre_transform: linear tau collapses to a single point") {
  const auto q = q_range(-5.0, 5.0, 0.5);
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) tau[i] = 0.5 * q[i] - 1.0;
  const auto spec = legendre_transform(spectrum_from_tau(q, tau));
  for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
    CHECK(spec.alpha[i] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spec.f[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("legendre_transform: quadratic tau has the closed-form spectrum") {
  const double h0 = 0.7, lambda = 0.1;
  const auto q = q_range(-4.0, 4.0, 0.5);
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    tau[i] = h0 * q[i] - 0.5 * lambda * q[i] * q[i] - 1.0;
  const auto spec = legendre_transform(spectrum_from_tau(q, tau));
  // Central differences are exact for a quadratic at interior points.
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    CHECK(spec.alpha[i] == doctest::Approx(h0 - lambda * q[i]).epsilon(1e-12));
    const double expected =
        1.0 - (spec.alpha[i] - h0) * (spec.alpha[i] - h0) / (2.0 * lambda);
    CHECK(spec.f[i] == doctest::Approx(expected).epsilon(1e-12));
    CHECK_FALSE(spec.flagged[i]);
  }
  // Legendre consistency: q*alpha - f reproduces tau.
  for (std::size_t i = 0; i < q.size(); ++i)
    CHECK(q[i] * spec.alpha[i] - spec.f[i] == doctest::Approx(tau[i]).epsilon(1e-12));
}

TEST_CASE("legendre_transform: convex tau fails, local bumps get flagged") {
  const auto q = q_range(-3.0, 3.0, 1.0);
  std::vector<double> convex(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) convex[i] = q[i] * q[i];
  CHECK_THROWS_AS(legendre_transform(spectrum_from_tau(q, convex)), numeric_error);

  // A single concavity violation is flagged, not dropped.
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    tau[i] = 0.7 * q[i] - 0.05 * q[i] * q[i] - 1.0;
  tau[4] -= 0.8;  // dent makes alpha jump upward around index 4
  const auto spec = legendre_transform(spectrum_from_tau(q, tau));
  CHECK(spec.flagged.size() == q.size());
  CHECK(spec.n_valid() < q.size());
  CHECK(spec.n_valid() >= 2);
}

TEST_CASE("legendre_transform: needs 3 points and finite tau") {
  CHECK_THROWS_AS(legendre_transform(spectrum_from_tau({0.0, 1.0}, {-1.0, -0.3})),
                  config_error);
  auto hs = spectrum_from_tau({-1.0, 0.0, 1.0}, {-1.7, -1.0, -0.3});
  hs.tau[1] = std::nan("");
  CHECK_THROWS_AS(legendre_transform(hs), numeric_error);
}

TEST_CASE("legendre_transform: binomial-cascade tau gives the known spectrum") {
  const double a = 0.6, b = 0.4;
  const auto q = q_range(-5.0, 5.0, 0.5);
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) tau[i] = cascade_tau(a, q[i]);
  const auto spec = legendre_transform(spectrum_from_tau(q, tau));

  double f_max = -1.0, alpha_at_max = 0.0;
  for (std::size_t i = 0; i < spec.f.size(); ++i) {
    if (!spec.flagged[i] && spec.f[i] > f_max) {
      f_max = spec.f[i];
      alpha_at_max = spec.alpha[i];
    }
  }
  CHECK(f_max == doctest::Approx(1.0).epsilon(0.05));
  // Peak position: alpha at q -> 0 is -(ln a + ln b) / (2 ln 2).
  const double alpha0 = -(std::log(a) + std::log(b)) / (2.0 * std::log(2.0));
  CHECK(alpha_at_max == doctest::Approx(alpha0).epsilon(0.05));
  // alpha spans [-ln a / ln 2, -ln b / ln 2] asymptotically.
  const auto [lo, hi] = std::minmax_element(spec.alpha.begin(), spec.alpha.end());
  CHECK(*lo > -std::log(a) / std::log(2.0) - 0.05);
  CHECK(*hi < -std::log(b) / std::log(2.0) + 0.05);
}

TEST_CASE("fit_spectrum: symmetric parabola recovered exactly") {
  std::vector<double> alpha, f;
  for (double x = 0.2; x <= 1.001; x += 0.1) {
    alpha.push_back(x);
    f.push_back(1.0 - 4.0 * (x - 0.6) * (x - 0.6));
  }
  const auto params = fit_spectrum(sample_spectrum(alpha, f), SpectrumFitKind::quadratic);
  CHECK(params.alpha0 == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(params.alpha_min == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(params.alpha_max == doctest::Approx(1.1).epsilon(1e-8));
  CHECK(params.width == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(params.skew == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(params.coeffs[1]) < 1e-9);  // B = 0 for a symmetric spectrum
  CHECK(params.coeffs[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(params.coeffs[2] == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("fit_spectrum: planted quartic coefficients recovered to 1e-9") {
  const double alpha0 = 0.55;
  const double A = 1.0, B = 0.0, C = -2.0, D = 0.5, E = -1.0;
  std::vector<double> alpha, f;
  for (double t = -0.6; t <= 0.601; t += 0.1) {
    alpha.push_back(alpha0 + t);
    f.push_back(A + B * t + C * t * t + D * t * t * t + E * t * t * t * t);
  }
  const auto params = fit_spectrum(sample_spectrum(alpha, f), SpectrumFitKind::quartic);
  CHECK(params.alpha0 == doctest::Approx(alpha0).epsilon(1e-9));
  CHECK(params.coeffs[0] == doctest::Approx(A).epsilon(1e-9));
  CHECK(std::abs(params.coeffs[1] - B) < 1e-9);
  CHECK(params.coeffs[2] == doctest::Approx(C).epsilon(1e-9));
  CHECK(params.coeffs[3] == doctest::Approx(D).epsilon(1e-9));
  CHECK(params.coeffs[4] == doctest::Approx(E).epsilon(1e-9));
  // Positive D skews the spectrum rightward: the right root is farther out.
  CHECK(params.skew > 1.0);
  CHECK(params.alpha_max - params.alpha0 > params.alpha0 - params.alpha_min);
}

TEST_CASE("fit_spectrum: flagged points are excluded, minimum counts enforced") {
  std::vector<double> alpha, f;
  for (double x = 0.2; x <= 1.001; x += 0.1) {
    alpha.push_back(x);
    f.push_back(1.0 - 4.0 * (x - 0.6) * (x - 0.6));
  }
  auto spec = sample_spectrum(alpha, f);
  spec.alpha[3] = 5.0;  // would wreck the fit if it were included
  spec.f[3] = -7.0;
  spec.flagged[3] = true;
  const auto params = fit_spectrum(spec, SpectrumFitKind::quadratic);
  CHECK(params.alpha0 == doctest::Approx(0.6).epsilon(1e-9));

  CHECK_THROWS_AS(
      fit_spectrum(sample_spectrum({0.1, 0.2, 0.3, 0.4}, {0.1, 0.9, 0.9, 0.1}),
                   SpectrumFitKind::quadratic),
      numeric_error);
  CHECK_THROWS_AS(
      fit_spectrum(sample_spectrum({0.1, 0.2, 0.3, 0.4, 0.5, 0.6},
                                   {0.1, 0.5, 0.9, 0.9, 0.5, 0.1}),
                   SpectrumFitKind::quartic),
      numeric_error);
}

TEST_CASE("fit_spectrum: width undefined when no roots bracket the maximum") {
  // Nearly flat spectrum around f = 1: the fitted parabola never crosses
  // zero within twice the data range.
  std::vector<double> alpha, f;
  for (double x = 0.45; x <= 0.5501; x += 0.01) {
    alpha.push_back(x);
    f.push_back(1.0 - 0.5 * (x - 0.5) * (x - 0.5));
  }
  try {
    fit_spectrum(sample_spectrum(alpha, f), SpectrumFitKind::quadratic);
    FAIL("expected width_undefined_error");
  } catch (const width_undefined_error& e) {
    CHECK(std::isfinite(e.partial().alpha0));
    CHECK(e.partial().alpha0 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::isnan(e.partial().width));
    CHECK(std::isnan(e.partial().skew));
  }
}

TEST_CASE("monofractal input: spectrum collapses to a point") {
  // Near-linear tau: the alpha values collapse. The fitted parabola is then
  // so flat that its roots fall outside twice the data range, which is
  // exactly the width-undefined condition; alpha0 is still recovered.
  const double lambda = 1e-3;
  const auto q = q_range(-5.0, 5.0, 0.5);
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    tau[i] = 0.5 * q[i] - 0.5 * lambda * q[i] * q[i] - 1.0;
  const auto spec = legendre_transform(spectrum_from_tau(q, tau));

  const auto [lo, hi] = std::minmax_element(spec.alpha.begin(), spec.alpha.end());
  CHECK(*hi - *lo < 0.1);
  try {
    fit_spectrum(spec, SpectrumFitKind::quadratic);
    FAIL("expected width_undefined_error for a collapsed spectrum");
  } catch (const width_undefined_error& e) {
    CHECK(e.partial().alpha0 == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("weakly multifractal input: width is defined and matches the roots") {
  // lambda = 0.005 over q in [-10, 10]: data alpha range 0.1, fitted roots at
  // alpha0 +- sqrt(2 lambda) = +- 0.1, inside the 2x bracketing window.
  const double lambda = 0.005;
  const auto q = q_range(-10.0, 10.0, 0.5);
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    tau[i] = 0.5 * q[i] - 0.5 * lambda * q[i] * q[i] - 1.0;
  const auto spec = legendre_transform(spectrum_from_tau(q, tau));
  const auto params = fit_spectrum(spec, SpectrumFitKind::quadratic);
  CHECK(params.alpha0 == doctest::Approx(0.5).epsilon(1e-6));
  // one-sided differences at the q endpoints perturb the fit at the 1e-4 level
  CHECK(params.width == doctest::Approx(2.0 * std::sqrt(2.0 * lambda)).epsilon(1e-3));
  CHECK(params.skew == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("compare_surrogate: deltas and verdicts") {
  const auto q = q_range(-5.0, 5.0, 0.5);
  std::vector<double> tau(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    tau[i] = 0.8 * q[i] - 0.01 * q[i] * q[i] - 1.0;
  const auto hs = spectrum_from_tau(q, tau);
  const auto params = fit_spectrum(legendre_transform(hs), SpectrumFitKind::quadratic);

  SUBCASE("identical inputs are fat-tail dominated with zero deltas") {
    const auto cmp = compare_surrogate(hs, params, hs, params);
    CHECK(cmp.mean_abs_delta_h == 0.0);
    CHECK(cmp.delta_width == 0.0);
    CHECK(cmp.delta_alpha0 == 0.0);
    CHECK(cmp.verdict == Attribution::fat_tail_dominated);
  }

  SUBCASE("large h(q) gap is correlation dominated") {
    auto shuffled = hs;
    for (double& h : shuffled.h) h -= 0.3;
    for (std::size_t i = 0; i < q.size(); ++i)
      shuffled.tau[i] = q[i] * shuffled.h[i] - 1.0;
    const auto sp =
        fit_spectrum(legendre_transform(shuffled), SpectrumFitKind::quadratic);
    const auto cmp = compare_surrogate(hs, params, shuffled, sp);
    CHECK(cmp.mean_abs_delta_h == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(cmp.verdict == Attribution::correlation_dominated);
  }

  SUBCASE("mismatched grids are rejected") {
    auto other = spectrum_from_tau(q_range(-4.0, 4.0, 0.5),
                                   std::vector<double>(17, -1.0));
    CHECK_THROWS_AS(compare_surrogate(hs, params, other, params), config_error);
    auto range_mismatch = hs;
    range_mismatch.fit_range = {10, 100};
    CHECK_THROWS_AS(compare_surrogate(hs, params, range_mismatch, params), config_error);
  }
}

TEST_CASE("i.i.d. fat-tailed series: shuffling changes nothing measurable") {
  // Shuffling an i.i.d. heavy-tailed series preserves its distribution, so
  // the multifractality it shows is all distributional.
  GridSpec grid;
  grid.q_values = q_range(-5.0, 5.0, 0.5);
  grid.detrend_order = 2;
  grid.scales = log_spaced_scales(8, 1024, 20);

  double delta_h2 = 0.0;
  const int n_seeds = 3;
  int correlation_verdicts = 0;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const auto ts = generate(GeneratorSpec::pareto(3.0, 8192, 600 + seed));
    const auto orig = fit_hurst(
        fluctuation_surface(profile(ts), grid), {8, 1024});
    const auto shuf = fit_hurst(
        fluctuation_surface(profile(shuffle(ts, 700 + seed)), grid), {8, 1024});
    delta_h2 += std::abs(orig.h2 - shuf.h2);
    const auto op = fit_spectrum(legendre_transform(orig), SpectrumFitKind::quartic);
    const auto sp = fit_spectrum(legendre_transform(shuf), SpectrumFitKind::quartic);
    if (compare_surrogate(orig, op, shuf, sp).verdict ==
        Attribution::correlation_dominated)
      ++correlation_verdicts;
  }
  CHECK(delta_h2 / n_seeds < 0.05);
  CHECK(correlation_verdicts == 0);
}
