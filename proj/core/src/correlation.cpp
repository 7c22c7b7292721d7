#include "mfdfa/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "linreg.hpp"

namespace mfdfa {

AutocorrelationResult autocorrelation(const TimeSeries& series, int max_lag) {
  validate_series(series);
  const std::size_t n = series.size();
  if (max_lag < 1) throw config_error("max_lag must be >= 1");
  if (static_cast<std::size_t>(max_lag) >= n / 2)
    throw config_error("max_lag " + std::to_string(max_lag) +
                       " too large: need max_lag < N/2 with N = " + std::to_string(n));

  double mean = 0.0;
  for (double v : series.values) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> centered(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = series.values[i] - mean;
    var += centered[i] * centered[i];
  }
  var /= static_cast<double>(n);
  if (var <= 0.0)
    throw numeric_error("degenerate series '" + series.label +
                        "': zero variance, autocorrelation undefined");

  AutocorrelationResult result;
  result.n_source = n;
  result.lags.resize(static_cast<std::size_t>(max_lag));
  result.values.resize(static_cast<std::size_t>(max_lag));
  for (int s = 1; s <= max_lag; ++s) {
    double acc = 0.0;
    const std::size_t terms = n - static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < terms; ++i)
      acc += centered[i] * centered[i + static_cast<std::size_t>(s)];
    const double c = acc / static_cast<double>(terms) / var;
    // Keep C(s) inside [-1, 1]; the 1/(N-s) averaging can push a hair past.
    result.lags[static_cast<std::size_t>(s - 1)] = s;
    result.values[static_cast<std::size_t>(s - 1)] = std::clamp(c, -1.0, 1.0);
  }
  return result;
}

DecayClassification classify_decay(const AutocorrelationResult& acf,
                                   LagRange fit_range) {
  if (fit_range.lo < 1 || fit_range.hi < fit_range.lo)
    throw config_error("invalid lag range for decay classification");

  // Only lags with C(s) > 0 enter: both candidate laws are fitted in
  // log-transformed C.
  std::vector<double> s_vals, c_vals;
  for (std::size_t i = 0; i < acf.lags.size(); ++i) {
    const int s = acf.lags[i];
    if (s < fit_range.lo || s > fit_range.hi) continue;
    if (acf.values[i] > 0.0) {
      s_vals.push_back(static_cast<double>(s));
      c_vals.push_back(acf.values[i]);
    }
  }

  DecayClassification out;
  if (s_vals.size() < 5) {
    out.law = DecayLaw::uncorrelated;
    out.fit_quality = 0.0;
    return out;
  }

  const std::size_t n = s_vals.size();
  std::vector<double> log_s(n), log_c(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_s[i] = std::log(s_vals[i]);
    log_c[i] = std::log(c_vals[i]);
  }

  const auto power = detail::fit_line(log_s, log_c);  // log C vs log s
  const auto expo = detail::fit_line(s_vals, log_c);  // log C vs s

  const double gamma = -power.slope;
  const bool power_ok = power.r2 > 0.7 && gamma > 0.0 && gamma < 1.0;
  const bool expo_ok = expo.r2 > 0.7 && expo.slope < 0.0;

  if (power_ok && (!expo_ok || power.r2 >= expo.r2)) {
    out.law = DecayLaw::power_law;
    out.gamma = gamma;
    out.fit_quality = power.r2;
  } else if (expo_ok) {
    out.law = DecayLaw::exponential;
    out.s0 = -1.0 / expo.slope;
    out.fit_quality = expo.r2;
  } else {
    out.law = DecayLaw::uncorrelated;
    out.fit_quality = std::max(power.r2, expo.r2);
  }
  return out;
}

TailEstimate tail_exponent(const TimeSeries& returns, double tail_fraction) {
  validate_series(returns);
  if (!(tail_fraction > 0.0) || tail_fraction > 0.5)
    throw config_error("tail_fraction must lie in (0, 0.5]");
  const std::size_t n = returns.size();

  // Scale normalization only: dividing by the sample standard deviation
  // removes the unit without bending the tail, so a pure power law stays a
  // pure power law.
  double mean = 0.0;
  for (double v : returns.values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : returns.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var <= 0.0)
    throw numeric_error("degenerate series '" + returns.label +
                        "': zero variance, tail undefined");
  const double sd = std::sqrt(var);

  std::vector<double> magnitude(n);
  for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::abs(returns.values[i]) / sd;
  std::sort(magnitude.begin(), magnitude.end(), std::greater<>());

  const std::size_t k = static_cast<std::size_t>(tail_fraction * static_cast<double>(n));
  if (k < 10)
    throw data_error("insufficient data: tail holds " + std::to_string(k) +
                     " points, need >= 10");

  // Empirical CCDF at the i-th largest magnitude is i/N.
  std::vector<double> log_r, log_ccdf;
  log_r.reserve(k);
  log_ccdf.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (magnitude[i] <= 0.0) break;  // sorted descending: the rest are zero too
    log_r.push_back(std::log(magnitude[i]));
    log_ccdf.push_back(std::log(static_cast<double>(i + 1) / static_cast<double>(n)));
  }
  if (log_r.size() < 10)
    throw data_error("insufficient data: fewer than 10 positive tail magnitudes");

  const auto fit = detail::fit_line(log_r, log_ccdf);
  if (!(fit.slope < 0.0))
    throw numeric_error("tail fit slope is non-negative: no decaying tail");

  TailEstimate est;
  est.zeta = -fit.slope;
  est.tail_fraction = tail_fraction;
  est.n_tail = log_r.size();
  return est;
}

}  // namespace mfdfa
