#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "mfdfa/time_series.hpp"

namespace mfdfa {

/// Reads one value column plus its date column from a CSV file.
/// Requirements: header row, ISO-8601 dates, '.' decimal point, UTF-8,
/// strictly increasing dates. Errors carry the offending row (1-based,
/// counting the header) and column.
TimeSeries ingest_csv(const std::filesystem::path& path,
                      const std::string& date_column,
                      const std::string& value_column,
                      bool require_positive = true);

/// Serializes with shortest round-trip number formatting, so emit -> ingest
/// reproduces values bit-identically.
std::string series_to_csv(const TimeSeries& series,
                          const std::string& date_column = "date",
                          const std::string& value_column = "value");

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const std::string& date_column = "date",
                      const std::string& value_column = "value");

struct JoinReport {
  std::size_t matched = 0;
  std::size_t dropped_prices = 0;
  std::size_t dropped_rates = 0;
};

/// Inner join on dates; output value = price * rate per matched day.
/// Unmatched days are dropped and counted. Empty intersection is an error.
TimeSeries convert_currency(const TimeSeries& prices, const TimeSeries& rates,
                            JoinReport* report = nullptr);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace mfdfa
