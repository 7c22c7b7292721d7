#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "mfdfa/time_series.hpp"

namespace mfdfa {

/// Seeded generators with known scaling properties; the test oracles for
/// every analysis stage.
enum class GeneratorKind {
  gaussian_white,    // i.i.d. N(0, 1)
  ar1,               // x[t+1] = phi * x[t] + N(0,1), stationary start
  fgn,               // fractional Gaussian noise, exact circulant embedding
  binomial_cascade,  // dyadic multiplicative measure, multipliers a / 1-a
  pareto,            // i.i.d. Pareto, CCDF x^-zeta on [1, inf)
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::gaussian_white;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  double param = 0.0;  // phi | H | a | zeta, depending on kind

  static GeneratorSpec gaussian_white(std::size_t n, std::uint64_t seed);
  static GeneratorSpec ar1(double phi, std::size_t n, std::uint64_t seed);
  static GeneratorSpec fgn(double hurst, std::size_t n, std::uint64_t seed);
  static GeneratorSpec binomial_cascade(double a, std::size_t n, std::uint64_t seed);
  static GeneratorSpec pareto(double zeta, std::size_t n, std::uint64_t seed);

  /// Throws config_error on invalid parameters; fgn and binomial_cascade
  /// require power-of-two lengths.
  void validate() const;
};

/// Deterministic for a fixed spec: same seed, same bytes.
TimeSeries generate(const GeneratorSpec& spec);

GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind kind);

}  // namespace mfdfa
