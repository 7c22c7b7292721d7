#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mfdfa/errors.hpp"

namespace mfdfa {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws data_error.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// Ordered real-valued observations, optionally date-stamped. The universal
/// input of every analysis stage.
struct TimeSeries {
  std::vector<double> values;
  std::vector<Date> dates;  // empty, or aligned 1:1 with values
  std::string label;

  std::size_t size() const noexcept { return values.size(); }
  bool has_dates() const noexcept { return !dates.empty(); }
};

/// Checks the analysis-entry invariants: length >= 2, all values finite,
/// dates (when present) aligned and strictly increasing.
void validate_series(const TimeSeries& series);

/// Cumulative sum of the mean-subtracted series. By construction the last
/// element is zero up to rounding.
struct Profile {
  std::vector<double> cumulative;
  double source_mean = 0.0;

  std::size_t size() const noexcept { return cumulative.size(); }
};

enum class ExtremaKind { maxima, minima };

/// Per-window extrema of a series over consecutive non-overlapping windows
/// of fixed length. The trailing incomplete window is dropped.
struct ExtremaSequence {
  std::vector<double> values;
  int window_length = 0;
  ExtremaKind kind = ExtremaKind::maxima;
};

/// Logarithmic returns ln P[t+1] - ln P[t]. Prices must be strictly
/// positive; output is one element shorter, dates carry the later day.
TimeSeries log_returns(const TimeSeries& prices);

/// Centers to zero mean and scales to unit standard deviation under the
/// population (1/N) convention. Throws numeric_error on zero variance.
TimeSeries normalize_returns(const TimeSeries& returns);

/// Profile Y(i) = sum_{k<=i} (x_k - <x>).
Profile profile(const TimeSeries& series);

ExtremaSequence extrema_sequence(const TimeSeries& series, int window_length,
                                 ExtremaKind kind);

TimeSeries to_series(const ExtremaSequence& sequence, std::string label);

/// Uniformly random permutation of the values (Fisher-Yates driven by
/// xoshiro256**), deterministic for a fixed seed. Dates are dropped: a
/// permuted series has no meaningful timestamps.
TimeSeries shuffle(const TimeSeries& series, std::uint64_t seed);

}  // namespace mfdfa
