// mfdfa: multifractal detrended fluctuation analysis of time series.
//
// Subcommands: analyze (full pipeline), synth (test-signal generator),
// acf, mfdfa, spectrum (stage-level entry points), convert (currency join).
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numerical degeneracy.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfdfa/pipeline.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/version.hpp"

namespace fs = std::filesystem;
using namespace mfdfa;

namespace {

struct IngestOptions {
  std::string input;
  std::string date_col = "date";
  std::string price_col = "price";
  bool is_returns = false;
};

void add_ingest_options(CLI::App* cmd, IngestOptions& opt) {
  cmd->add_option("--input", opt.input, "input CSV file")->required();
  cmd->add_option("--date-col", opt.date_col, "date column name (ISO-8601 values)");
  cmd->add_option("--price-col", opt.price_col, "price/value column name");
  cmd->add_flag("--returns", opt.is_returns,
                "input values are already returns, skip the log-return step");
}

// ingest -> returns -> normalize, as the pipeline does before any analysis.
TimeSeries load_normalized(const IngestOptions& opt) {
  TimeSeries raw = ingest_csv(opt.input, opt.date_col, opt.price_col, !opt.is_returns);
  const TimeSeries returns = opt.is_returns ? raw : log_returns(raw);
  return normalize_returns(returns);
}

ScaleRange parse_region(const std::string& text) {
  const auto pos = text.find(':');
  ScaleRange range;
  bool ok = pos != std::string::npos;
  if (ok) {
    const auto lo = text.substr(0, pos);
    const auto hi = text.substr(pos + 1);
    ok = std::from_chars(lo.data(), lo.data() + lo.size(), range.lo).ec == std::errc{} &&
         std::from_chars(hi.data(), hi.data() + hi.size(), range.hi).ec == std::errc{};
  }
  if (!ok || range.lo < 2 || range.hi < range.lo)
    throw config_error("bad --region '" + text + "': expected lo:hi with 2 <= lo <= hi");
  return range;
}

void write_text(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + out_path + "'");
  out << content;
}

void attach_synthetic_dates(TimeSeries& ts) {
  const auto start = std::chrono::sys_days{std::chrono::year{2000} /
                                           std::chrono::January / std::chrono::day{3}};
  ts.dates.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts.dates[i] = Date{start + std::chrono::days{static_cast<int>(i)}};
}

nlohmann::ordered_json classification_json(const DecayClassification& cls) {
  nlohmann::ordered_json j;
  switch (cls.law) {
    case DecayLaw::power_law:
      j["law"] = "power_law";
      break;
    case DecayLaw::exponential:
      j["law"] = "exponential";
      break;
    case DecayLaw::uncorrelated:
      j["law"] = "uncorrelated";
      break;
  }
  j["gamma"] = cls.gamma ? nlohmann::ordered_json(*cls.gamma)
                         : nlohmann::ordered_json(nullptr);
  j["s0"] = cls.s0 ? nlohmann::ordered_json(*cls.s0) : nlohmann::ordered_json(nullptr);
  j["fit_quality"] = cls.fit_quality;
  return j;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------
int cmd_analyze(const IngestOptions& ingest, const PipelineConfig& cfg) {
  PipelineConfig config = cfg;
  config.input = ingest.input;
  config.date_column = ingest.date_col;
  config.price_column = ingest.price_col;
  config.input_is_returns = ingest.is_returns;

  const AnalysisReport report = run_pipeline(config);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  write_report(report, config.out_dir, config.format);
  std::cout << "report written to " << (config.out_dir / (config.format == ReportFormat::json
                                                              ? "report.json"
                                                              : "table.csv"))
                   .string()
            << " (" << report.analyses.size() << " table rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------
int cmd_synth(const std::string& kind_name, std::size_t length, std::uint64_t seed,
              std::optional<double> param, const std::string& out_path) {
  GeneratorSpec spec;
  spec.kind = parse_generator_kind(kind_name);
  spec.length = length;
  spec.seed = seed;
  if (param) {
    spec.param = *param;
  } else {
    switch (spec.kind) {  // sensible demo defaults
      case GeneratorKind::ar1: spec.param = 0.5; break;
      case GeneratorKind::fgn: spec.param = 0.7; break;
      case GeneratorKind::binomial_cascade: spec.param = 0.6; break;
      case GeneratorKind::pareto: spec.param = 3.0; break;
      default: break;
    }
  }
  TimeSeries ts = generate(spec);
  attach_synthetic_dates(ts);
  write_text(out_path, series_to_csv(ts, "date", "value"));
  std::cerr << "generated " << ts.label << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// acf
// ---------------------------------------------------------------------------
int cmd_acf(const IngestOptions& ingest, int max_lag, int fit_lo, int fit_hi,
            const std::string& format, const std::string& out_path) {
  const TimeSeries normalized = load_normalized(ingest);
  const int lag =
      std::min<int>(max_lag, static_cast<int>(normalized.size() / 2) - 1);
  const auto acf = autocorrelation(normalized, lag);
  const auto cls = classify_decay(acf, {fit_lo, fit_hi > 0 ? std::min(fit_hi, lag) : lag});

  if (format == "json") {
    nlohmann::ordered_json j;
    j["lags"] = acf.lags;
    j["values"] = acf.values;
    j["classification"] = classification_json(cls);
    write_text(out_path, j.dump(2) + "\n");
  } else {
    std::string csv = "s,C\n";
    for (std::size_t i = 0; i < acf.lags.size(); ++i)
      csv += std::to_string(acf.lags[i]) + ',' + format_double(acf.values[i]) + '\n';
    write_text(out_path, csv);
    std::cerr << "classification: " << classification_json(cls).dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// mfdfa
// ---------------------------------------------------------------------------
int cmd_mfdfa(const IngestOptions& ingest, double q_min, double q_max, double q_step,
              int s_min, int s_max, int order, std::vector<std::string> region_args,
              const std::string& out_dir) {
  const TimeSeries normalized = load_normalized(ingest);
  const std::size_t n = normalized.size();

  GridSpec grid;
  grid.q_values = q_grid(q_min, q_max, q_step);
  grid.detrend_order = order;
  const int lo = std::max(s_min, order + 2);
  const int hi = s_max > 0 ? s_max : static_cast<int>(n / 5);
  grid.scales = log_spaced_scales(lo, hi);
  grid.validate(n);

  std::vector<ScaleRange> regions;
  for (const auto& text : region_args) regions.push_back(parse_region(text));
  if (regions.empty()) regions.push_back({grid.scales.front(), grid.scales.back()});

  const auto surface = fluctuation_surface(profile(normalized), grid);
  for (const auto& w : surface.warnings) std::cerr << "warning: " << w << "\n";

  fs::create_directories(out_dir);
  std::string fq = "s,q,F\n";
  for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi)
    for (std::size_t si = 0; si < grid.scales.size(); ++si)
      fq += std::to_string(grid.scales[si]) + ',' + format_double(grid.q_values[qi]) +
            ',' + format_double(surface.at(qi, si)) + '\n';
  write_text((fs::path(out_dir) / "fq.csv").string(), fq);

  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto hs = fit_hurst(surface, regions[r]);
    std::string hurst = "q,h,stderr\n";
    std::string tau = "q,tau\n";
    for (std::size_t i = 0; i < hs.q_values.size(); ++i) {
      hurst += format_double(hs.q_values[i]) + ',' + format_double(hs.h[i]) + ',' +
               format_double(hs.h_se[i]) + '\n';
      tau += format_double(hs.q_values[i]) + ',' + format_double(hs.tau[i]) + '\n';
    }
    const std::string tag = "_r" + std::to_string(r + 1);
    write_text((fs::path(out_dir) / ("hurst" + tag + ".csv")).string(), hurst);
    write_text((fs::path(out_dir) / ("tau" + tag + ".csv")).string(), tau);
    std::printf("region %zu [%d, %d]: h(2) = %.4f, gamma = %.4f, beta = %.4f\n", r + 1,
                regions[r].lo, regions[r].hi, hs.h2, hs.gamma, hs.beta);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------
int cmd_spectrum(const std::string& hurst_csv, const std::string& fit_name,
                 const std::string& out_dir) {
  std::ifstream in(hurst_csv);
  if (!in) throw data_error("cannot open '" + hurst_csv + "'");
  std::string line;
  if (!std::getline(in, line)) throw data_error("'" + hurst_csv + "' is empty");

  // locate q and h columns in the header
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  int q_idx = -1, h_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "q") q_idx = static_cast<int>(i);
    if (header[i] == "h") h_idx = static_cast<int>(i);
  }
  if (q_idx < 0 || h_idx < 0)
    throw data_error("'" + hurst_csv + "' needs 'q' and 'h' columns");

  HurstSpectrum hs;
  hs.fit_range = {0, 0};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    try {
      hs.q_values.push_back(std::stod(fields.at(static_cast<std::size_t>(q_idx))));
      hs.h.push_back(std::stod(fields.at(static_cast<std::size_t>(h_idx))));
    } catch (const std::exception&) {
      throw data_error("'" + hurst_csv + "' row " + std::to_string(row) +
                       ": cannot parse q/h");
    }
  }
  hs.h_se.assign(hs.h.size(), 0.0);
  hs.tau.resize(hs.h.size());
  for (std::size_t i = 0; i < hs.h.size(); ++i)
    hs.tau[i] = hs.q_values[i] * hs.h[i] - 1.0;

  const auto kind =
      fit_name == "quadratic" ? SpectrumFitKind::quadratic : SpectrumFitKind::quartic;
  const auto spec = legendre_transform(hs);
  const auto params = fit_spectrum(spec, kind);

  fs::create_directories(out_dir);
  std::string csv = "alpha,f\n";
  for (std::size_t i = 0; i < spec.alpha.size(); ++i)
    csv += format_double(spec.alpha[i]) + ',' + format_double(spec.f[i]) + '\n';
  write_text((fs::path(out_dir) / "spectrum.csv").string(), csv);

  nlohmann::ordered_json j;
  j["alpha0"] = params.alpha0;
  j["W"] = params.width;
  j["r"] = params.skew;
  j["B"] = params.coeffs[1];
  j["D"] = params.coeffs[3];
  j["alpha_min"] = params.alpha_min;
  j["alpha_max"] = params.alpha_max;
  j["fit_kind"] = to_string(params.fit_kind);
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------
int cmd_convert(const IngestOptions& ingest, const std::string& rates_path,
                const std::string& rate_col, const std::string& out_path) {
  const auto prices = ingest_csv(ingest.input, ingest.date_col, ingest.price_col, true);
  const auto rates = ingest_csv(rates_path, ingest.date_col, rate_col, true);
  JoinReport join;
  const auto converted = convert_currency(prices, rates, &join);
  write_text(out_path, series_to_csv(converted, ingest.date_col, ingest.price_col));
  std::cerr << "joined " << join.matched << " days (" << join.dropped_prices
            << " price days and " << join.dropped_rates << " rate days dropped)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multifractal detrended fluctuation analysis toolkit"};
  app.set_version_flag("--version", std::string(k_version));
  app.require_subcommand(1);

  // analyze -----------------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "run the full analysis pipeline");
  IngestOptions an_ingest;
  add_ingest_options(analyze, an_ingest);
  PipelineConfig cfg;
  std::vector<std::string> region_args;
  std::string format = "json", rates_path, out_dir;
  analyze->add_option("--rates", rates_path, "currency-rate CSV for day-by-day conversion");
  analyze->add_option("--q-min", cfg.q_min, "lowest moment order (default -10)");
  analyze->add_option("--q-max", cfg.q_max, "highest moment order (default 10)");
  analyze->add_option("--q-step", cfg.q_step, "moment order step (default 0.5)");
  analyze->add_option("--s-min", cfg.s_min, "smallest scale (default 6)");
  analyze->add_option("--s-max", cfg.s_max, "largest scale (default N/5)");
  analyze->add_option("--order", cfg.detrend_order, "detrending polynomial order (default 2)");
  analyze->add_option("--region", region_args, "fit region lo:hi, repeatable")
      ->take_all();
  analyze->add_option("--window", cfg.extrema_windows,
                      "extrema window length in days, repeatable (default 5 10)")
      ->take_all();
  analyze->add_option("--shuffles", cfg.shuffle_count, "shuffled surrogates per series (default 1)");
  analyze->add_option("--seed", cfg.base_seed, "base seed for surrogates (default 42)");
  analyze->add_option("--out", out_dir, "output directory")->required();
  analyze->add_option("--format", format, "report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // synth -------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic series as CSV");
  std::string kind_name;
  std::size_t length = 16384;
  std::uint64_t seed = 1;
  std::optional<double> phi, hurst, a_param, zeta;
  std::string synth_out;
  synth
      ->add_option("--kind", kind_name,
                   "gaussian_white | ar1 | fgn | binomial_cascade | pareto")
      ->required();
  synth->add_option("--length", length, "series length (power of two for fgn/cascade)");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--phi", phi, "ar1 coefficient in (-1, 1)");
  synth->add_option("--hurst", hurst, "fgn Hurst exponent in (0, 1)");
  synth->add_option("--a", a_param, "cascade multiplier in (0, 1), a != 0.5");
  synth->add_option("--zeta", zeta, "pareto tail exponent > 1");
  synth->add_option("--out", synth_out, "output CSV ('-' or empty for stdout)");

  // acf ---------------------------------------------------------------------
  auto* acf = app.add_subcommand("acf", "autocorrelation of normalized returns");
  IngestOptions acf_ingest;
  add_ingest_options(acf, acf_ingest);
  int max_lag = 100, fit_lo = 1, fit_hi = 0;
  std::string acf_format = "csv", acf_out;
  acf->add_option("--max-lag", max_lag, "largest lag (clamped to N/2 - 1)");
  acf->add_option("--fit-lo", fit_lo, "first lag of the classification window");
  acf->add_option("--fit-hi", fit_hi, "last lag of the classification window (default max lag)");
  acf->add_option("--format", acf_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  acf->add_option("--out", acf_out, "output file ('-' or empty for stdout)");

  // mfdfa -------------------------------------------------------------------
  auto* dfa = app.add_subcommand("mfdfa", "fluctuation surface and h(q) for one series");
  IngestOptions dfa_ingest;
  add_ingest_options(dfa, dfa_ingest);
  double dq_min = -10.0, dq_max = 10.0, dq_step = 0.5;
  int ds_min = 6, ds_max = 0, order = 2;
  std::vector<std::string> dfa_regions;
  std::string dfa_out;
  dfa->add_option("--q-min", dq_min, "lowest moment order");
  dfa->add_option("--q-max", dq_max, "highest moment order");
  dfa->add_option("--q-step", dq_step, "moment order step");
  dfa->add_option("--s-min", ds_min, "smallest scale");
  dfa->add_option("--s-max", ds_max, "largest scale (default N/5)");
  dfa->add_option("--order", order, "detrending polynomial order");
  dfa->add_option("--region", dfa_regions, "fit region lo:hi, repeatable")->take_all();
  dfa->add_option("--out", dfa_out, "output directory")->required();

  // spectrum ------------------------------------------------------------------
  auto* spectrum =
      app.add_subcommand("spectrum", "singularity spectrum from an h(q) table");
  std::string hurst_csv, fit_name = "quartic", spectrum_out = ".";
  spectrum->add_option("--hurst-csv", hurst_csv, "CSV with q,h columns (mfdfa output)")
      ->required();
  spectrum->add_option("--fit", fit_name, "quadratic or quartic")
      ->check(CLI::IsMember({"quadratic", "quartic"}));
  spectrum->add_option("--out", spectrum_out, "output directory for spectrum.csv");

  // convert -------------------------------------------------------------------
  auto* convert = app.add_subcommand("convert", "convert prices with day-by-day rates");
  IngestOptions conv_ingest;
  add_ingest_options(convert, conv_ingest);
  std::string conv_rates, rate_col = "rate", conv_out;
  convert->add_option("--rates", conv_rates, "rate CSV (same date column)")->required();
  convert->add_option("--rate-col", rate_col, "rate column name (default 'rate')");
  convert->add_option("--out", conv_out, "output file ('-' or empty for stdout)");

  try {
    app.parse(argc, argv);

    if (*analyze) {
      for (const auto& text : region_args) cfg.regions.push_back(parse_region(text));
      cfg.rates = rates_path;
      cfg.out_dir = out_dir;
      cfg.format = format == "csv" ? ReportFormat::csv : ReportFormat::json;
      return cmd_analyze(an_ingest, cfg);
    }
    if (*synth) {
      std::optional<double> param;
      switch (parse_generator_kind(kind_name)) {
        case GeneratorKind::ar1: param = phi; break;
        case GeneratorKind::fgn: param = hurst; break;
        case GeneratorKind::binomial_cascade: param = a_param; break;
        case GeneratorKind::pareto: param = zeta; break;
        case GeneratorKind::gaussian_white: break;
      }
      return cmd_synth(kind_name, length, seed, param, synth_out);
    }
    if (*acf) return cmd_acf(acf_ingest, max_lag, fit_lo, fit_hi, acf_format, acf_out);
    if (*dfa)
      return cmd_mfdfa(dfa_ingest, dq_min, dq_max, dq_step, ds_min, ds_max, order,
                       dfa_regions, dfa_out);
    if (*spectrum) return cmd_spectrum(hurst_csv, fit_name, spectrum_out);
    if (*convert) return cmd_convert(conv_ingest, conv_rates, rate_col, conv_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
