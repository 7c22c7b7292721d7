#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mfdfa/time_series.hpp"

namespace mfdfa {

/// Sample autocorrelation C(s) at lags 1..max_lag. C(s) is the lag-s
/// autocovariance with 1/(N-s) averaging, normalized by the population
/// variance, and clamped into [-1, 1].
struct AutocorrelationResult {
  std::vector<int> lags;
  std::vector<double> values;
  std::size_t n_source = 0;
};

AutocorrelationResult autocorrelation(const TimeSeries& series, int max_lag);

enum class DecayLaw { power_law, exponential, uncorrelated };

struct LagRange {
  int lo = 1;
  int hi = 1;  // inclusive
};

/// Outcome of fitting the two candidate decay laws to positive ACF values:
///   power_law    C(s) ~ s^-gamma       (long-range correlation)
///   exponential  C(s) ~ exp(-s/s0)     (short-range correlation)
///   uncorrelated neither fits with R^2 > 0.7
struct DecayClassification {
  DecayLaw law = DecayLaw::uncorrelated;
  std::optional<double> gamma;  // present iff power_law
  std::optional<double> s0;     // present iff exponential
  double fit_quality = 0.0;     // R^2 in the fitted coordinates
};

DecayClassification classify_decay(const AutocorrelationResult& acf,
                                   LagRange fit_range);

/// Tail exponent of the return distribution: slope of the empirical
/// complementary CDF of scale-normalized |returns| on log-log axes, fitted
/// over the top `tail_fraction` order statistics.
struct TailEstimate {
  double zeta = 0.0;
  double tail_fraction = 0.0;
  std::size_t n_tail = 0;
};

TailEstimate tail_exponent(const TimeSeries& returns, double tail_fraction = 0.05);

}  // namespace mfdfa
