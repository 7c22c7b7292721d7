#include "mfdfa/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "mfdfa/rng.hpp"

namespace mfdfa {

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  const char* p = text.data();
  const char* end = p + text.size();
  auto r1 = std::from_chars(p, end, y);
  if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != '-')
    throw data_error("invalid date '" + std::string(text) + "': expected YYYY-MM-DD");
  auto r2 = std::from_chars(r1.ptr + 1, end, m);
  if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != '-')
    throw data_error("invalid date '" + std::string(text) + "': expected YYYY-MM-DD");
  auto r3 = std::from_chars(r2.ptr + 1, end, d);
  if (r3.ec != std::errc{} || r3.ptr != end)
    throw data_error("invalid date '" + std::string(text) + "': expected YYYY-MM-DD");

  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok())
    throw data_error("invalid calendar date '" + std::string(text) + "'");
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

void validate_series(const TimeSeries& series) {
  if (series.size() < 2)
    throw data_error("series '" + series.label + "' too short: need length >= 2, got " +
                     std::to_string(series.size()));
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (!std::isfinite(series.values[i]))
      throw data_error("series '" + series.label + "' has non-finite value at index " +
                       std::to_string(i));
  }
  if (series.has_dates()) {
    if (series.dates.size() != series.values.size())
      throw data_error("series '" + series.label + "': date/value length mismatch");
    for (std::size_t i = 1; i < series.dates.size(); ++i) {
      if (!(series.dates[i - 1] < series.dates[i]))
        throw data_error("series '" + series.label +
                         "': dates not strictly increasing at index " + std::to_string(i));
    }
  }
}

TimeSeries log_returns(const TimeSeries& prices) {
  validate_series(prices);
  for (std::size_t i = 0; i < prices.values.size(); ++i) {
    if (!(prices.values[i] > 0.0))
      throw data_error("non-positive price at index " + std::to_string(i) +
                       ": log return undefined");
  }

  TimeSeries out;
  out.label = prices.label.empty() ? "returns" : prices.label + ":returns";
  out.values.resize(prices.size() - 1);
  for (std::size_t t = 0; t + 1 < prices.size(); ++t)
    out.values[t] = std::log(prices.values[t + 1]) - std::log(prices.values[t]);
  if (prices.has_dates())
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
  return out;
}

TimeSeries normalize_returns(const TimeSeries& returns) {
  validate_series(returns);
  const std::size_t n = returns.size();

  double mean = 0.0;
  for (double v : returns.values) mean += v;
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (double v : returns.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);  // population convention
  if (var <= 0.0)
    throw numeric_error("degenerate series '" + returns.label +
                        "': zero variance, cannot normalize");

  const double sd = std::sqrt(var);
  TimeSeries out;
  out.label = returns.label;
  out.dates = returns.dates;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = (returns.values[i] - mean) / sd;
  return out;
}

Profile profile(const TimeSeries& series) {
  validate_series(series);
  const std::size_t n = series.size();

  double mean = 0.0;
  for (double v : series.values) mean += v;
  mean /= static_cast<double>(n);

  Profile prof;
  prof.source_mean = mean;
  prof.cumulative.resize(n);
  double acc = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += series.values[i] - mean;
    prof.cumulative[i] = acc;
    max_abs = std::max(max_abs, std::abs(acc));
  }
  // Y(N) = 0 holds by construction; anything else is accumulated rounding.
  if (std::abs(acc) > 1e-9 * std::max(1.0, max_abs))
    throw numeric_error("profile of '" + series.label + "' does not close to zero");
  return prof;
}

ExtremaSequence extrema_sequence(const TimeSeries& series, int window_length,
                                 ExtremaKind kind) {
  validate_series(series);
  if (window_length < 1)
    throw config_error("extrema window length must be >= 1, got " +
                       std::to_string(window_length));
  const std::size_t r = static_cast<std::size_t>(window_length);
  const std::size_t n_windows = series.size() / r;
  if (n_windows == 0)
    throw config_error("extrema window " + std::to_string(window_length) +
                       " exceeds series length " + std::to_string(series.size()) +
                       ": empty output");

  ExtremaSequence seq;
  seq.window_length = window_length;
  seq.kind = kind;
  seq.values.resize(n_windows);
  for (std::size_t p = 0; p < n_windows; ++p) {
    const auto first = series.values.begin() + static_cast<std::ptrdiff_t>(p * r);
    const auto last = first + static_cast<std::ptrdiff_t>(r);
    seq.values[p] = (kind == ExtremaKind::maxima) ? *std::max_element(first, last)
                                                  : *std::min_element(first, last);
  }
  return seq;
}

TimeSeries to_series(const ExtremaSequence& sequence, std::string label) {
  TimeSeries out;
  out.values = sequence.values;
  out.label = std::move(label);
  return out;
}

TimeSeries shuffle(const TimeSeries& series, std::uint64_t seed) {
  validate_series(series);
  TimeSeries out;
  out.values = series.values;
  out.label = series.label.empty() ? "shuffled" : series.label + ":shuffled";

  Xoshiro256 rng(seed);
  for (std::size_t i = out.values.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(out.values[i], out.values[j]);
  }
  return out;
}

}  // namespace mfdfa
