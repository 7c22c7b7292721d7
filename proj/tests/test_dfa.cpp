#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfdfa/dfa.hpp"
#include "mfdfa/rng.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/time_series.hpp"

using namespace mfdfa;

namespace {

// Brute-force oracle for the detrending step: polynomial least squares via
// normal equations and Gaussian elimination, independent of the QR route
// used by the implementation.
double oracle_residual_variance(const std::vector<double>& y, int m) {
  const int n = static_cast<int>(y.size());
  const int d = m + 1;
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);  // any affine abscissa works
    std::vector<double> pow_x(2 * d, 1.0);
    for (std::size_t k = 1; k < pow_x.size(); ++k) pow_x[k] = pow_x[k - 1] * x;
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) a[r][c] += pow_x[r + c];
      a[r][d] += pow_x[r] * y[static_cast<std::size_t>(i)];
    }
  }
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (int c = col; c <= d; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> coef(d);
  for (int r = 0; r < d; ++r) coef[r] = a[r][d] / a[r][r];

  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    double fit = 0.0, p = 1.0;
    for (int k = 0; k < d; ++k) {
      fit += coef[k] * p;
      p *= x;
    }
    const double r = y[static_cast<std::size_t>(i)] - fit;
    ss += r * r;
  }
  return ss / n;
}

std::vector<double> oracle_segment_variances(const Profile& prof, int s, int m) {
  const std::size_t n = prof.size();
  const std::size_t ns = n / static_cast<std::size_t>(s);
  std::vector<double> out;
  for (std::size_t p = 0; p < ns; ++p) {
    std::vector<double> seg(prof.cumulative.begin() + p * s,
                            prof.cumulative.begin() + (p + 1) * s);
    out.push_back(oracle_residual_variance(seg, m));
  }
  for (std::size_t j = 0; j < ns; ++j) {
    const std::size_t start = n - (j + 1) * s;
    std::vector<double> seg(prof.cumulative.begin() + start,
                            prof.cumulative.begin() + start + s);
    out.push_back(oracle_residual_variance(seg, m));
  }
  return out;
}

TimeSeries gaussian_series(std::size_t n, std::uint64_t seed) {
  return generate(GeneratorSpec::gaussian_white(n, seed));
}

double cascade_h(double a, double q) {
  const double b = 1.0 - a;
  return 1.0 / q - std::log(std::pow(a, q) + std::pow(b, q)) / (q * std::log(2.0));
}

double cascade_tau(double a, double q) {
  const double b = 1.0 - a;
  return -std::log(std::pow(a, q) + std::pow(b, q)) / std::log(2.0);
}

}  // namespace

TEST_CASE("q_grid and default grids") {
  const auto q = q_grid(-10.0, 10.0, 0.5);
  REQUIRE(q.size() == 41);
  CHECK(q.front() == -10.0);
  CHECK(q.back() == 10.0);
  CHECK(q[20] == 0.0);  // exactly, so the q = 0 branch is taken
  CHECK_THROWS_AS(q_grid(1.0, 0.0, 0.5), config_error);
  CHECK_THROWS_AS(q_grid(0.0, 1.0, -0.5), config_error);

  const auto grid = GridSpec::make_default(10000, 3);
  CHECK(grid.detrend_order == 3);
  CHECK(grid.scales.front() >= 6);
  CHECK(grid.scales.back() <= 2000);
  CHECK(grid.scales.size() >= 20);
  CHECK_NOTHROW(grid.validate(10000));

  CHECK_THROWS_AS(log_spaced_scales(10, 5, 30), config_error);
}

TEST_CASE("segment_variances: agrees with the normal-equation oracle") {
  const auto prof = profile(gaussian_series(512, 41));
  for (const auto [s, m] : {std::pair{8, 1}, {16, 2}, {32, 3}, {100, 2}}) {
    const auto got = segment_variances(prof, s, m);
    const auto expected = oracle_segment_variances(prof, s, m);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_CASE("segment_variances: segment layout for N = 10, s = 3") {
  // A spike at the first profile point is only seen by forward segment 1;
  // the backward segments tile indices 2..10 (1-based). A spike at the last
  // point is only seen by the first backward segment.
  Profile spike_front;
  spike_front.cumulative.assign(10, 0.0);
  spike_front.cumulative[0] = 1.0;
  auto f2 = segment_variances(spike_front, 3, 1);
  REQUIRE(f2.size() == 6);
  CHECK(f2[0] > 0.0);
  for (std::size_t p = 1; p < 6; ++p) CHECK(f2[p] == doctest::Approx(0.0));

  Profile spike_back;
  spike_back.cumulative.assign(10, 0.0);
  spike_back.cumulative[9] = 1.0;
  f2 = segment_variances(spike_back, 3, 1);
  CHECK(f2[3] > 0.0);  // first backward segment covers indices 8..10
  for (std::size_t p : {0u, 1u, 2u, 4u, 5u}) CHECK(f2[p] == doctest::Approx(0.0));
}

TEST_CASE("segment_variances: order-m polynomial profiles are annihilated") {
  Profile quad;
  quad.cumulative.resize(200);
  for (std::size_t i = 0; i < quad.cumulative.size(); ++i) {
    const double x = static_cast<double>(i);
    quad.cumulative[i] = 3.0 - 0.5 * x + 0.01 * x * x;
  }
  for (double f2 : segment_variances(quad, 25, 2)) CHECK(std::abs(f2) < 1e-16);
}

TEST_CASE("segment_variances: scale bounds") {
  const auto prof = profile(gaussian_series(128, 2));
  CHECK_THROWS_AS(segment_variances(prof, 3, 2), config_error);    // below m+2
  CHECK_THROWS_AS(segment_variances(prof, 200, 2), config_error);  // no segment fits

  // The N/4 statistical-stability bound is enforced at the grid level.
  GridSpec grid;
  grid.q_values = {2.0};
  grid.scales = {8, 64};
  grid.detrend_order = 2;
  CHECK_THROWS_AS(grid.validate(128), config_error);
}

TEST_CASE("segment_variances: random-walk variance grows linearly in s") {
  // Monte Carlo: the profile of white noise is a random walk, so the mean
  // detrended variance scales like s^(2h) with h = 1/2.
  const std::vector<int> scales{16, 32, 64, 128, 256};
  std::vector<double> log_s, log_f2;
  for (int s : scales) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto prof = profile(gaussian_series(8192, 900 + seed));
      for (double f2 : segment_variances(prof, s, 2)) {
        acc += f2;
        ++count;
      }
    }
    log_s.push_back(std::log(static_cast<double>(s)));
    log_f2.push_back(std::log(acc / static_cast<double>(count)));
  }
  double sxx = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    mx += log_s[i];
    my += log_f2[i];
  }
  mx /= static_cast<double>(log_s.size());
  my /= static_cast<double>(log_s.size());
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    sxx += (log_s[i] - mx) * (log_s[i] - mx);
    sxy += (log_s[i] - mx) * (log_f2[i] - my);
  }
  CHECK(sxy / sxx == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("fluctuation_surface: constant segment variance collapses all q") {
  // Periodic profile, N a multiple of both scales: every segment carries the
  // same content, so F_q(s) = sqrt(v) for every q including zero.
  Profile prof;
  prof.cumulative.resize(64);
  for (std::size_t i = 0; i < 64; ++i)
    prof.cumulative[i] = std::sin(2.0 * 3.14159265358979 * (i % 8) / 8.0);

  GridSpec grid;
  grid.q_values = {-4.0, -1.0, 0.0, 1.0, 2.0, 4.0};
  grid.scales = {8, 16};
  grid.detrend_order = 1;
  const auto surface = fluctuation_surface(prof, grid);

  for (std::size_t si = 0; si < 2; ++si) {
    const auto f2 = segment_variances(prof, grid.scales[si], 1);
    const double expected = std::sqrt(f2[0]);
    for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi)
      CHECK(surface.at(qi, si) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("fluctuation_surface: q = 2 is the root mean square of F^2") {
  const auto prof = profile(gaussian_series(2048, 7));
  GridSpec grid;
  grid.q_values = {0.0, 2.0};
  grid.scales = {16, 32, 64};
  grid.detrend_order = 2;
  const auto surface = fluctuation_surface(prof, grid);
  for (std::size_t si = 0; si < grid.scales.size(); ++si) {
    const auto f2 = segment_variances(prof, grid.scales[si], 2);
    double mean = 0.0;
    for (double v : f2) mean += v;
    mean /= static_cast<double>(f2.size());
    CHECK(surface.at(1, si) == doctest::Approx(std::sqrt(mean)).epsilon(1e-12));
  }
}

TEST_CASE("fluctuation_surface: non-decreasing in q at every scale") {
  const auto prof = profile(gaussian_series(4096, 13));
  const auto grid = GridSpec::make_default(4096);
  const auto surface = fluctuation_surface(prof, grid);
  for (std::size_t si = 0; si < grid.scales.size(); ++si) {
    for (std::size_t qi = 1; qi < grid.q_values.size(); ++qi)
      CHECK(surface.at(qi, si) >= surface.at(qi - 1, si) * (1.0 - 1e-9));
  }
  CHECK(surface.degenerate_cells.empty());
}

TEST_CASE("fluctuation_surface: polynomial trends below the detrend order vanish") {
  const auto base = gaussian_series(4096, 3);
  TimeSeries trended = base;
  for (std::size_t i = 0; i < trended.values.size(); ++i) {
    const double x = static_cast<double>(i) / 4096.0;
    trended.values[i] += 5.0 + 4.0 * x;  // degree m-1 = 1 in the series
  }
  GridSpec grid;
  grid.q_values = {-4.0, -2.0, 0.0, 2.0, 4.0};
  grid.scales = log_spaced_scales(8, 512, 12);
  grid.detrend_order = 2;

  const auto clean = fluctuation_surface(profile(base), grid);
  const auto noisy = fluctuation_surface(profile(trended), grid);
  for (std::size_t i = 0; i < clean.values.size(); ++i)
    CHECK(noisy.values[i] == doctest::Approx(clean.values[i]).epsilon(1e-6));
}

TEST_CASE("fluctuation_surface: all-zero variance is a degenerate surface") {
  Profile flat;
  flat.cumulative.assign(256, 0.0);
  GridSpec grid;
  grid.q_values = {-2.0, 0.0, 2.0};
  grid.scales = {8, 16};
  grid.detrend_order = 1;
  CHECK_THROWS_WITH_AS(fluctuation_surface(flat, grid), doctest::Contains("scale 8"),
                       numeric_error);
}

TEST_CASE("fluctuation_surface: partially degenerate scales are floored and flagged") {
  TimeSeries ts;
  ts.values.assign(1024, 0.0);
  Xoshiro256 rng(17);
  for (std::size_t i = 768; i < 1024; ++i) ts.values[i] = rng.gaussian();

  GridSpec grid;
  grid.q_values = {-2.0, 0.0, 2.0};
  grid.scales = {8, 16};
  grid.detrend_order = 1;
  const auto surface = fluctuation_surface(profile(ts), grid);

  CHECK_FALSE(surface.degenerate_cells.empty());
  CHECK_FALSE(surface.warnings.empty());
  for (const auto& [qi, si] : surface.degenerate_cells)
    CHECK(grid.q_values[qi] <= 0.0);
  for (double v : surface.values) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("fit_hurst: exact scaling surfaces are recovered to 1e-9") {
  GridSpec grid;
  grid.q_values = {-2.0, 0.0, 2.0};
  grid.scales = log_spaced_scales(8, 128, 10);
  grid.detrend_order = 2;

  FluctuationSurface surface;
  surface.grid = grid;
  surface.values.resize(grid.q_values.size() * grid.scales.size());
  for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi)
    for (std::size_t si = 0; si < grid.scales.size(); ++si)
      surface.values[qi * grid.scales.size() + si] =
          3.7 * std::pow(static_cast<double>(grid.scales[si]), 0.7);

  const auto hs = fit_hurst(surface, {8, 128});
  for (std::size_t qi = 0; qi < hs.h.size(); ++qi) {
    CHECK(hs.h[qi] == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(hs.h_se[qi] < 1e-9);
  }
  // Derived identities hold exactly as stored.
  CHECK(hs.h2 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(hs.gamma == 2.0 - 2.0 * hs.h2);
  CHECK(hs.beta == 2.0 * hs.h2 - 1.0);
  CHECK(hs.tau[1] == -1.0);  // q = 0 exactly
}

TEST_CASE("fit_hurst: needs at least four scales in range") {
  const auto prof = profile(gaussian_series(2048, 21));
  GridSpec grid;
  grid.q_values = {2.0};
  grid.scales = log_spaced_scales(8, 256, 12);
  grid.detrend_order = 2;
  const auto surface = fluctuation_surface(prof, grid);
  CHECK_THROWS_AS(fit_hurst(surface, {200, 256}), config_error);
}

TEST_CASE("partition_tau: uniform measure gives tau(q) = q - 1") {
  TimeSeries uniform;
  uniform.values.assign(1024, 1.0 / 1024.0);
  const std::vector<int> scales{4, 8, 16, 32, 64, 128, 256};
  const std::vector<double> q{-5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0};
  const auto pt = partition_tau(uniform, scales, q);
  for (std::size_t qi = 0; qi < q.size(); ++qi)
    CHECK(pt.tau[qi] == doctest::Approx(q[qi] - 1.0).epsilon(1e-9));
}

TEST_CASE("partition_tau: tau(1) = 0 for any normalized measure at dyadic scales") {
  Xoshiro256 rng(77);
  TimeSeries measure;
  measure.values.resize(2048);
  double total = 0.0;
  for (double& v : measure.values) {
    v = rng.uniform01();
    total += v;
  }
  for (double& v : measure.values) v /= total;
  const auto pt = partition_tau(measure, {8, 16, 32, 64, 128, 256, 512}, {1.0});
  CHECK(std::abs(pt.tau[0]) < 1e-9);
}

TEST_CASE("partition_tau: binomial cascade matches the closed form") {
  const double a = 0.6;
  const auto cascade = generate(GeneratorSpec::binomial_cascade(a, 4096, 0));
  const std::vector<int> scales{8, 16, 32, 64, 128, 256, 512};
  const std::vector<double> q{-5.0, -3.0, -1.0, 1.0, 3.0, 5.0};
  const auto pt = partition_tau(cascade, scales, q);
  for (std::size_t qi = 0; qi < q.size(); ++qi)
    CHECK(pt.tau[qi] == doctest::Approx(cascade_tau(a, q[qi])).epsilon(1e-6));
}

TEST_CASE("partition_tau: zero boxes are excluded for negative q") {
  TimeSeries measure;
  measure.values = {0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0,
                    0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  const auto pt = partition_tau(measure, {2, 4}, {-1.0, 0.0, 1.0});
  for (double t : pt.tau) CHECK(std::isfinite(t));

  TimeSeries negative;
  negative.values = {0.5, -0.1, 0.6};
  CHECK_THROWS_AS(partition_tau(negative, {1, 2}, {1.0}), config_error);
}

TEST_CASE("MF-DFA recovers h(q) of the binomial cascade") {
  const double a = 0.6;
  const auto cascade = generate(GeneratorSpec::binomial_cascade(a, 8192, 0));
  GridSpec grid;
  grid.q_values = {-5.0, -3.0, -1.0, 1.0, 3.0, 5.0};
  grid.scales = log_spaced_scales(8, 2048, 20);
  grid.detrend_order = 1;
  const auto surface = fluctuation_surface(profile(cascade), grid);
  const auto hs = fit_hurst(surface, {8, 2048});
  for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi)
    CHECK(hs.h[qi] == doctest::Approx(cascade_h(a, grid.q_values[qi])).epsilon(0.08));
}

TEST_CASE("shuffling collapses fGn correlations to h(2) = 1/2") {
  GridSpec grid;
  grid.q_values = {2.0};
  grid.detrend_order = 2;
  grid.scales = log_spaced_scales(16, 1024, 20);

  double acc = 0.0;
  const int n_seeds = 10;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const auto fgn = generate(GeneratorSpec::fgn(0.8, 16384, 3000 + seed));
    const auto shuffled = shuffle(fgn, 5000 + seed);
    const auto surface = fluctuation_surface(profile(shuffled), grid);
    acc += fit_hurst(surface, {16, 1024}).h[0];
  }
  CHECK(acc / n_seeds == doctest::Approx(0.5).epsilon(0.1));
}
