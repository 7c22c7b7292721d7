#include "mfdfa/synth.hpp"

#include <bit>
#include <cmath>
#include <complex>

#include "fft.hpp"
#include "mfdfa/rng.hpp"

namespace mfdfa {

namespace {

std::string spec_label(const GeneratorSpec& spec) {
  std::string name = to_string(spec.kind);
  if (spec.kind != GeneratorKind::gaussian_white)
    name += "(" + std::to_string(spec.param) + ")";
  return name + "[n=" + std::to_string(spec.length) +
         ",seed=" + std::to_string(spec.seed) + "]";
}

std::vector<double> gen_gaussian_white(std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.gaussian();
  return x;
}

std::vector<double> gen_ar1(double phi, std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> x(n);
  // Stationary start: x0 drawn from the equilibrium distribution.
  x[0] = rng.gaussian() / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 1; t < n; ++t) x[t] = phi * x[t - 1] + rng.gaussian();
  return x;
}

// Fractional Gaussian noise by circulant embedding (Davies-Harte). The
// autocovariance gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H)/2 embeds into a
// circulant of size 2N whose eigenvalues are provably non-negative for
// H in (0, 1), so the synthesis is exact, not approximate.
std::vector<double> gen_fgn(double hurst, std::size_t n, std::uint64_t seed) {
  const double two_h = 2.0 * hurst;
  auto gamma = [two_h](std::size_t k) {
    const double kd = static_cast<double>(k);
    return 0.5 * (std::pow(kd + 1.0, two_h) - 2.0 * std::pow(kd, two_h) +
                  std::pow(std::abs(kd - 1.0), two_h));
  };

  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> c(m);
  c[0] = 1.0;
  c[n] = gamma(n);
  for (std::size_t j = 1; j < n; ++j) {
    const double g = gamma(j);
    c[j] = g;
    c[m - j] = g;
  }
  detail::fft_pow2(c, -1);

  std::vector<double> lambda(m);
  double max_lambda = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    lambda[k] = c[k].real();
    max_lambda = std::max(max_lambda, lambda[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (lambda[k] < 0.0) {
      if (lambda[k] < -1e-8 * max_lambda)
        throw numeric_error("circulant embedding produced a negative eigenvalue");
      lambda[k] = 0.0;  // rounding dust
    }
  }

  Xoshiro256 rng(seed);
  std::vector<std::complex<double>> a(m);
  a[0] = std::sqrt(lambda[0]) * rng.gaussian();
  a[n] = std::sqrt(lambda[n]) * rng.gaussian();
  for (std::size_t k = 1; k < n; ++k) {
    const double amp = std::sqrt(0.5 * lambda[k]);
    const std::complex<double> z(amp * rng.gaussian(), amp * rng.gaussian());
    a[k] = z;
    a[m - k] = std::conj(z);
  }
  detail::fft_pow2(a, -1);

  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = a[j].real() * norm;
  return x;
}

// Deterministic dyadic multiplicative cascade: the cell at index i carries
// a^(k - popcount(i)) * b^popcount(i) with b = 1 - a, so the values at level
// k = log2(n) are exactly the binomial multiset and sum to (a + b)^k = 1.
std::vector<double> gen_cascade(double a, std::size_t n) {
  const int levels = std::countr_zero(n);
  const double b = 1.0 - a;
  std::vector<double> pow_a(levels + 1, 1.0), pow_b(levels + 1, 1.0);
  for (int j = 1; j <= levels; ++j) {
    pow_a[j] = pow_a[j - 1] * a;
    pow_b[j] = pow_b[j - 1] * b;
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int ones = std::popcount(i);
    x[i] = pow_a[levels - ones] * pow_b[ones];
  }
  return x;
}

std::vector<double> gen_pareto(double zeta, std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> x(n);
  const double inv = -1.0 / zeta;
  for (double& v : x) {
    const double u = 1.0 - rng.uniform01();  // (0, 1]
    v = std::pow(u, inv);                    // CCDF(v) = v^-zeta on [1, inf)
  }
  return x;
}

}  // namespace

GeneratorSpec GeneratorSpec::gaussian_white(std::size_t n, std::uint64_t seed) {
  return {GeneratorKind::gaussian_white, n, seed, 0.0};
}
GeneratorSpec GeneratorSpec::ar1(double phi, std::size_t n, std::uint64_t seed) {
  return {GeneratorKind::ar1, n, seed, phi};
}
GeneratorSpec GeneratorSpec::fgn(double hurst, std::size_t n, std::uint64_t seed) {
  return {GeneratorKind::fgn, n, seed, hurst};
}
GeneratorSpec GeneratorSpec::binomial_cascade(double a, std::size_t n,
                                              std::uint64_t seed) {
  return {GeneratorKind::binomial_cascade, n, seed, a};
}
GeneratorSpec GeneratorSpec::pareto(double zeta, std::size_t n, std::uint64_t seed) {
  return {GeneratorKind::pareto, n, seed, zeta};
}

void GeneratorSpec::validate() const {
  if (length < 2) throw config_error("generator length must be >= 2");
  switch (kind) {
    case GeneratorKind::gaussian_white:
      break;
    case GeneratorKind::ar1:
      if (!(param > -1.0 && param < 1.0))
        throw config_error("ar1 needs phi in (-1, 1)");
      break;
    case GeneratorKind::fgn:
      if (!(param > 0.0 && param < 1.0))
        throw config_error("fgn needs H in (0, 1)");
      if (!detail::is_power_of_two(length))
        throw config_error("fgn length must be a power of two");
      break;
    case GeneratorKind::binomial_cascade:
      if (!(param > 0.0 && param < 1.0))
        throw config_error("binomial_cascade needs a in (0, 1)");
      if (param == 0.5)
        throw config_error("binomial_cascade with a = 0.5 is a uniform measure");
      if (!detail::is_power_of_two(length))
        throw config_error("binomial_cascade length must be a power of two");
      break;
    case GeneratorKind::pareto:
      if (!(param > 1.0)) throw config_error("pareto needs zeta > 1");
      break;
  }
}

TimeSeries generate(const GeneratorSpec& spec) {
  spec.validate();
  TimeSeries out;
  out.label = spec_label(spec);
  switch (spec.kind) {
    case GeneratorKind::gaussian_white:
      out.values = gen_gaussian_white(spec.length, spec.seed);
      break;
    case GeneratorKind::ar1:
      out.values = gen_ar1(spec.param, spec.length, spec.seed);
      break;
    case GeneratorKind::fgn:
      out.values = gen_fgn(spec.param, spec.length, spec.seed);
      break;
    case GeneratorKind::binomial_cascade:
      out.values = gen_cascade(spec.param, spec.length);
      break;
    case GeneratorKind::pareto:
      out.values = gen_pareto(spec.param, spec.length, spec.seed);
      break;
  }
  return out;
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "gaussian_white") return GeneratorKind::gaussian_white;
  if (name == "ar1") return GeneratorKind::ar1;
  if (name == "fgn") return GeneratorKind::fgn;
  if (name == "binomial_cascade") return GeneratorKind::binomial_cascade;
  if (name == "pareto") return GeneratorKind::pareto;
  throw config_error("unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::gaussian_white:
      return "gaussian_white";
    case GeneratorKind::ar1:
      return "ar1";
    case GeneratorKind::fgn:
      return "fgn";
    case GeneratorKind::binomial_cascade:
      return "binomial_cascade";
    case GeneratorKind::pareto:
      return "pareto";
  }
  return "unknown";
}

}  // namespace mfdfa
