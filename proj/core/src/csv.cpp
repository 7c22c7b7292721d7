#include "mfdfa/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <vector>

namespace mfdfa {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

double parse_double_field(const std::string& field, std::size_t row,
                          const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw data_error("row " + std::to_string(row) + ", column '" + column +
                     "': cannot parse '" + field + "' as a number");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

TimeSeries ingest_csv(const std::filesystem::path& path, const std::string& date_column,
                      const std::string& value_column, bool require_positive) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line))
    throw data_error("'" + path.string() + "': empty file, header row required");
  const auto header = split_fields(line);

  const auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw data_error("'" + path.string() + "': column '" + name + "' not found");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_idx = find_column(date_column);
  const std::size_t value_idx = find_column(value_column);

  TimeSeries series;
  series.label = path.filename().string();
  std::size_t row = 1;  // header
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw data_error("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));

    Date date;
    try {
      date = parse_date(fields[date_idx]);
    } catch (const data_error& e) {
      throw data_error("row " + std::to_string(row) + ", column '" + date_column +
                       "': " + e.what());
    }
    if (!series.dates.empty() && !(series.dates.back() < date))
      throw data_error("row " + std::to_string(row) +
                       ": dates must be strictly increasing ('" +
                       format_date(series.dates.back()) + "' >= '" + format_date(date) +
                       "')");

    const double value = parse_double_field(fields[value_idx], row, value_column);
    if (require_positive && !(value > 0.0))
      throw data_error("row " + std::to_string(row) + ", column '" + value_column +
                       "': value must be positive, got " + fields[value_idx]);

    series.dates.push_back(date);
    series.values.push_back(value);
  }
  if (series.values.empty())
    throw data_error("'" + path.string() + "': no data rows");
  return series;
}

std::string series_to_csv(const TimeSeries& series, const std::string& date_column,
                          const std::string& value_column) {
  std::string out = date_column + "," + value_column + "\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (series.has_dates())
      out += format_date(series.dates[i]);
    else
      out += std::to_string(i + 1);
    out += ',';
    out += format_double(series.values[i]);
    out += '\n';
  }
  return out;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const std::string& date_column, const std::string& value_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path.string() + "'");
  out << series_to_csv(series, date_column, value_column);
}

TimeSeries convert_currency(const TimeSeries& prices, const TimeSeries& rates,
                            JoinReport* report) {
  if (!prices.has_dates() || !rates.has_dates())
    throw data_error("currency conversion needs dated series on both sides");
  validate_series(prices);
  validate_series(rates);
  for (std::size_t i = 0; i < rates.values.size(); ++i)
    if (!(rates.values[i] > 0.0))
      throw data_error("conversion rate at index " + std::to_string(i) +
                       " is not positive");

  TimeSeries out;
  out.label = prices.label + "*" + rates.label;
  JoinReport local{};
  std::size_t ri = 0;
  for (std::size_t pi = 0; pi < prices.values.size(); ++pi) {
    while (ri < rates.dates.size() && rates.dates[ri] < prices.dates[pi]) {
      ++ri;
      ++local.dropped_rates;
    }
    if (ri < rates.dates.size() && rates.dates[ri] == prices.dates[pi]) {
      out.dates.push_back(prices.dates[pi]);
      out.values.push_back(prices.values[pi] * rates.values[ri]);
      ++local.matched;
      ++ri;
    } else {
      ++local.dropped_prices;
    }
  }
  local.dropped_rates += rates.dates.size() - ri;

  if (out.values.empty())
    throw data_error("currency conversion failed: no overlapping dates between '" +
                     prices.label + "' and '" + rates.label + "'");
  if (report) *report = local;
  return out;
}

}  // namespace mfdfa
