#include "mfdfa/pipeline.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "mfdfa/rng.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/version.hpp"

namespace mfdfa {

namespace {

using ojson = nlohmann::ordered_json;

// Rethrows library errors with the pipeline stage prepended, preserving the
// error class (and thereby the CLI exit code).
template <typename F>
auto stage(const std::string& name, F&& fn) {
  try {
    return fn();
  } catch (const config_error& e) {
    throw config_error("stage '" + name + "': " + e.what());
  } catch (const data_error& e) {
    throw data_error("stage '" + name + "': " + e.what());
  } catch (const numeric_error& e) {
    throw numeric_error("stage '" + name + "': " + e.what());
  }
}

std::string law_name(DecayLaw law) {
  switch (law) {
    case DecayLaw::power_law:
      return "power_law";
    case DecayLaw::exponential:
      return "exponential";
    case DecayLaw::uncorrelated:
      return "uncorrelated";
  }
  return "uncorrelated";
}

SeriesAnalysis analyze_region(const FluctuationSurface& surface, ScaleRange range) {
  SeriesAnalysis out;
  out.hurst = fit_hurst(surface, range);
  out.spectrum = legendre_transform(out.hurst);
  out.complexity = fit_spectrum(out.spectrum, SpectrumFitKind::quartic);
  return out;
}

// Full MF-DFA chain for one series: surface once, then per-region fits for
// the original and every shuffled surrogate.
void analyze_series(AnalysisReport& report, const std::string& name,
                    const TimeSeries& series, const GridSpec& grid,
                    const std::vector<ScaleRange>& regions, int shuffle_count,
                    std::uint64_t series_seed) {
  const FluctuationSurface surface =
      stage(name + "/mfdfa", [&] { return fluctuation_surface(profile(series), grid); });
  for (const auto& w : surface.warnings) report.warnings.push_back(name + ": " + w);

  std::vector<FluctuationSurface> shuffled_surfaces;
  shuffled_surfaces.reserve(static_cast<std::size_t>(shuffle_count));
  for (int k = 0; k < shuffle_count; ++k) {
    const std::uint64_t seed = derive_stream(series_seed, static_cast<std::uint64_t>(k));
    const TimeSeries surrogate = shuffle(series, seed);
    shuffled_surfaces.push_back(stage(name + "/mfdfa-shuffle", [&] {
      return fluctuation_surface(profile(surrogate), grid);
    }));
  }

  for (std::size_t r = 0; r < regions.size(); ++r) {
    AnalysisBlock block;
    block.series = name;
    block.region = static_cast<int>(r) + 1;
    block.fit_range = regions[r];
    block.original =
        stage(name + "/fit", [&] { return analyze_region(surface, regions[r]); });
    for (const auto& ss : shuffled_surfaces)
      block.shuffles.push_back(
          stage(name + "/fit-shuffle", [&] { return analyze_region(ss, regions[r]); }));
    if (!block.shuffles.empty())
      block.attribution = compare_surrogate(
          block.original.hurst, block.original.complexity, block.shuffles[0].hurst,
          block.shuffles[0].complexity);
    report.analyses.push_back(std::move(block));
  }

  report.surfaces.emplace(name, surface);
}

void analyze_acf(AnalysisReport& report, const std::string& name,
                 const TimeSeries& series) {
  const std::size_t n = series.size();
  const int max_lag = std::min<int>(100, static_cast<int>(n / 2) - 1);
  AcfBlock block;
  block.series = name;
  block.acf = stage(name + "/acf", [&] { return autocorrelation(series, max_lag); });
  block.classification = classify_decay(block.acf, LagRange{1, max_lag});
  report.acf.push_back(std::move(block));
}

ojson hurst_to_json(const HurstSpectrum& hs) {
  ojson j;
  j["q"] = hs.q_values;
  j["h"] = hs.h;
  j["stderr"] = hs.h_se;
  j["tau"] = hs.tau;
  j["h2"] = hs.h2;
  j["gamma"] = hs.gamma;
  j["beta"] = hs.beta;
  return j;
}

ojson spectrum_to_json(const SingularitySpectrum& spec) {
  ojson j;
  j["alpha"] = spec.alpha;
  j["f"] = spec.f;
  j["q"] = spec.source_q;
  std::vector<int> flags(spec.flagged.size());
  for (std::size_t i = 0; i < spec.flagged.size(); ++i) flags[i] = spec.flagged[i] ? 1 : 0;
  j["flagged"] = flags;
  return j;
}

ojson complexity_to_json(const ComplexityParams& p) {
  ojson j;
  j["alpha0"] = p.alpha0;
  j["W"] = p.width;
  j["r"] = p.skew;
  j["B"] = p.coeffs[1];
  j["D"] = p.coeffs[3];
  j["A"] = p.coeffs[0];
  j["C"] = p.coeffs[2];
  j["E"] = p.coeffs[4];
  j["alpha_min"] = p.alpha_min;
  j["alpha_max"] = p.alpha_max;
  j["fit_kind"] = to_string(p.fit_kind);
  return j;
}

ojson analysis_to_json(const SeriesAnalysis& a) {
  ojson j;
  j["hurst"] = hurst_to_json(a.hurst);
  j["spectrum"] = spectrum_to_json(a.spectrum);
  j["complexity"] = complexity_to_json(a.complexity);
  return j;
}

ojson config_to_json(const PipelineConfig& cfg) {
  ojson j;
  j["input"] = cfg.input.string();
  j["date_column"] = cfg.date_column;
  j["price_column"] = cfg.price_column;
  j["input_is_returns"] = cfg.input_is_returns;
  j["rates"] = cfg.rates.string();
  j["q_min"] = cfg.q_min;
  j["q_max"] = cfg.q_max;
  j["q_step"] = cfg.q_step;
  j["s_min"] = cfg.s_min;
  j["s_max"] = cfg.s_max;
  j["detrend_order"] = cfg.detrend_order;
  j["scale_count"] = cfg.scale_count;
  ojson regions = ojson::array();
  for (const auto& r : cfg.regions) regions.push_back({{"lo", r.lo}, {"hi", r.hi}});
  j["regions"] = regions;
  j["extrema_windows"] = cfg.extrema_windows;
  j["extrema_scales"] = {{"lo", cfg.extrema_scales.lo}, {"hi", cfg.extrema_scales.hi}};
  j["shuffles"] = cfg.shuffle_count;
  j["seed"] = cfg.base_seed;
  j["format"] = cfg.format == ReportFormat::json ? "json" : "csv";
  return j;
}

std::string csv_line(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += format_double(v);
    first = false;
  }
  line += '\n';
  return line;
}

}  // namespace

void PipelineConfig::validate() const {
  if (input.empty()) throw config_error("no input file configured");
  if (!(q_step > 0.0) || q_max < q_min)
    throw config_error("invalid q grid: need q_min <= q_max and q_step > 0");
  if (s_min < 2) throw config_error("s_min must be >= 2");
  if (s_max != 0 && s_max < s_min) throw config_error("s_max must be 0 or >= s_min");
  if (detrend_order < 1) throw config_error("detrend order must be >= 1");
  if (scale_count < 2) throw config_error("scale count must be >= 2");
  for (const auto& r : regions)
    if (r.lo < 2 || r.hi < r.lo)
      throw config_error("invalid fit region [" + std::to_string(r.lo) + ", " +
                         std::to_string(r.hi) + "]");
  for (int w : extrema_windows)
    if (w < 1) throw config_error("extrema windows must be >= 1");
  if (extrema_scales.lo < 2 || extrema_scales.hi < extrema_scales.lo)
    throw config_error("invalid extrema scale bounds");
  if (shuffle_count < 0) throw config_error("shuffle count must be >= 0");
}

AnalysisReport run_pipeline(const PipelineConfig& config) {
  config.validate();

  AnalysisReport report;
  report.config = config;
  report.tool_version = std::string(k_version);
  report.input_path = config.input.string();
  report.input_hash = stage("ingest", [&] { return hash_file(config.input); });

  TimeSeries raw = stage("ingest", [&] {
    return ingest_csv(config.input, config.date_column, config.price_column,
                      !config.input_is_returns);
  });
  report.n_input = raw.size();

  if (!config.rates.empty()) {
    const TimeSeries rates = stage("ingest-rates", [&] {
      return ingest_csv(config.rates, config.date_column, config.price_column, true);
    });
    JoinReport join;
    raw = stage("convert", [&] { return convert_currency(raw, rates, &join); });
    report.warnings.push_back(
        "currency conversion: " + std::to_string(join.matched) + " days matched, " +
        std::to_string(join.dropped_prices) + " price days and " +
        std::to_string(join.dropped_rates) + " rate days dropped");
  }

  const TimeSeries returns =
      config.input_is_returns ? raw : stage("returns", [&] { return log_returns(raw); });
  report.n_returns = returns.size();
  const TimeSeries normalized =
      stage("normalize", [&] { return normalize_returns(returns); });

  analyze_acf(report, "total", normalized);
  report.tail = stage("tail", [&] { return tail_exponent(returns, 0.05); });

  // MF-DFA grid for the full series.
  const std::size_t n = normalized.size();
  const std::vector<double> q = q_grid(config.q_min, config.q_max, config.q_step);
  const int s_lo = std::max(config.s_min, config.detrend_order + 2);
  const int s_hi = config.s_max > 0 ? config.s_max : static_cast<int>(n / 5);
  GridSpec grid;
  grid.q_values = q;
  grid.detrend_order = config.detrend_order;
  grid.scales = stage("grid", [&] {
    return log_spaced_scales(s_lo, s_hi, config.scale_count);
  });
  stage("grid", [&] {
    grid.validate(n);
    return 0;
  });

  std::vector<ScaleRange> regions = config.regions;
  if (regions.empty()) regions.push_back({grid.scales.front(), grid.scales.back()});

  std::uint64_t series_index = 0;
  analyze_series(report, "total", normalized, grid, regions, config.shuffle_count,
                 derive_stream(config.base_seed, series_index++));

  // Extrema sequences are analyzed raw (no re-normalization) over their own
  // scale interval, one fit region each.
  for (int window : config.extrema_windows) {
    for (const ExtremaKind kind : {ExtremaKind::maxima, ExtremaKind::minima}) {
      const std::string name =
          (kind == ExtremaKind::maxima ? "maxima_R" : "minima_R") + std::to_string(window);
      const TimeSeries seq = stage(name, [&] {
        return to_series(extrema_sequence(normalized, window, kind), name);
      });

      const int seq_lo = std::max(config.extrema_scales.lo, config.detrend_order + 2);
      const int seq_hi =
          std::min(config.extrema_scales.hi, static_cast<int>(seq.size() / 4));
      GridSpec seq_grid;
      seq_grid.q_values = q;
      seq_grid.detrend_order = config.detrend_order;
      seq_grid.scales = stage(name + "/grid", [&] {
        return log_spaced_scales(seq_lo, seq_hi, config.scale_count);
      });
      stage(name + "/grid", [&] {
        seq_grid.validate(seq.size());
        return 0;
      });

      analyze_acf(report, name, seq);
      analyze_series(report, name, seq, seq_grid,
                     {{seq_grid.scales.front(), seq_grid.scales.back()}},
                     config.shuffle_count, derive_stream(config.base_seed, series_index++));
    }
  }

  return report;
}

std::string report_to_json(const AnalysisReport& report) {
  ojson j;
  j["tool"] = {{"name", "mfdfa"}, {"version", report.tool_version}};
  j["provenance"] = {{"input", report.input_path},
                     {"input_hash", report.input_hash},
                     {"config", config_to_json(report.config)}};
  j["input"] = {{"n_rows", report.n_input}, {"n_returns", report.n_returns}};

  ojson acf = ojson::array();
  for (const auto& block : report.acf) {
    ojson b;
    b["series"] = block.series;
    b["lags"] = block.acf.lags;
    b["values"] = block.acf.values;
    ojson cls;
    cls["law"] = law_name(block.classification.law);
    cls["gamma"] = block.classification.gamma ? ojson(*block.classification.gamma)
                                              : ojson(nullptr);
    cls["s0"] =
        block.classification.s0 ? ojson(*block.classification.s0) : ojson(nullptr);
    cls["fit_quality"] = block.classification.fit_quality;
    b["classification"] = cls;
    acf.push_back(std::move(b));
  }
  j["acf"] = acf;

  j["tail"] = {{"zeta", report.tail.zeta},
               {"tail_fraction", report.tail.tail_fraction},
               {"n_tail", report.tail.n_tail}};

  ojson analyses = ojson::array();
  for (const auto& block : report.analyses) {
    ojson b;
    b["series"] = block.series;
    b["region"] = block.region;
    b["scale_lo"] = block.fit_range.lo;
    b["scale_hi"] = block.fit_range.hi;
    b["original"] = analysis_to_json(block.original);
    ojson shuffles = ojson::array();
    for (const auto& s : block.shuffles) shuffles.push_back(analysis_to_json(s));
    b["shuffles"] = shuffles;
    if (block.attribution) {
      const auto& at = *block.attribution;
      b["attribution"] = {{"mean_abs_delta_h", at.mean_abs_delta_h},
                          {"delta_W", at.delta_width},
                          {"delta_alpha0", at.delta_alpha0},
                          {"verdict", to_string(at.verdict)}};
    } else {
      b["attribution"] = nullptr;
    }
    analyses.push_back(std::move(b));
  }
  j["analyses"] = analyses;

  // Complexity-parameter table: one row per series x region, original values
  // paired with their first shuffled surrogate.
  ojson table = ojson::array();
  for (const auto& block : report.analyses) {
    ojson row;
    row["series"] = block.series;
    row["region"] = block.region;
    row["alpha0"] = block.original.complexity.alpha0;
    row["W"] = block.original.complexity.width;
    row["r"] = block.original.complexity.skew;
    row["B"] = block.original.complexity.coeffs[1];
    row["D"] = block.original.complexity.coeffs[3];
    if (!block.shuffles.empty()) {
      row["shuffled"] = {{"alpha0", block.shuffles[0].complexity.alpha0},
                         {"W", block.shuffles[0].complexity.width},
                         {"r", block.shuffles[0].complexity.skew}};
    } else {
      row["shuffled"] = nullptr;
    }
    table.push_back(std::move(row));
  }
  j["table"] = table;

  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string report_table_csv(const AnalysisReport& report) {
  std::string out =
      "series,region,scale_lo,scale_hi,alpha0,W,r,B,D,sh_alpha0,sh_W,sh_r,verdict\n";
  for (const auto& block : report.analyses) {
    out += block.series + ',' + std::to_string(block.region) + ',' +
           std::to_string(block.fit_range.lo) + ',' + std::to_string(block.fit_range.hi);
    const auto& p = block.original.complexity;
    for (double v : {p.alpha0, p.width, p.skew, p.coeffs[1], p.coeffs[3]})
      out += ',' + format_double(v);
    if (!block.shuffles.empty()) {
      const auto& sp = block.shuffles[0].complexity;
      for (double v : {sp.alpha0, sp.width, sp.skew}) out += ',' + format_double(v);
    } else {
      out += ",,,";
    }
    out += ',';
    out += block.attribution ? to_string(block.attribution->verdict) : "";
    out += '\n';
  }
  return out;
}

void write_report(const AnalysisReport& report, const std::filesystem::path& out_dir,
                  ReportFormat format) {
  // Everything is rendered before the first byte hits disk, so a failed
  // stage never leaves partial output behind.
  std::vector<std::pair<std::string, std::string>> files;
  if (format == ReportFormat::json)
    files.emplace_back("report.json", report_to_json(report));
  else
    files.emplace_back("table.csv", report_table_csv(report));

  for (const auto& [name, surface] : report.surfaces) {
    std::string csv = "s,q,F\n";
    const auto& grid = surface.grid;
    for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi)
      for (std::size_t si = 0; si < grid.scales.size(); ++si)
        csv += std::to_string(grid.scales[si]) + ',' + format_double(grid.q_values[qi]) +
               ',' + format_double(surface.at(qi, si)) + '\n';
    files.emplace_back("fq_" + name + ".csv", std::move(csv));
  }

  for (const auto& block : report.analyses) {
    const std::string suffix = block.series + "_r" + std::to_string(block.region);
    const auto emit_analysis = [&](const SeriesAnalysis& a, const std::string& tag) {
      std::string hurst = "q,h,stderr\n";
      std::string tau = "q,tau\n";
      for (std::size_t i = 0; i < a.hurst.q_values.size(); ++i) {
        hurst += csv_line({a.hurst.q_values[i], a.hurst.h[i], a.hurst.h_se[i]});
        tau += csv_line({a.hurst.q_values[i], a.hurst.tau[i]});
      }
      std::string spectrum = "alpha,f\n";
      for (std::size_t i = 0; i < a.spectrum.alpha.size(); ++i)
        spectrum += csv_line({a.spectrum.alpha[i], a.spectrum.f[i]});
      files.emplace_back("hurst_" + suffix + tag + ".csv", std::move(hurst));
      files.emplace_back("tau_" + suffix + tag + ".csv", std::move(tau));
      files.emplace_back("spectrum_" + suffix + tag + ".csv", std::move(spectrum));
    };
    emit_analysis(block.original, "");
    for (std::size_t k = 0; k < block.shuffles.size(); ++k)
      emit_analysis(block.shuffles[k], "_sh" + std::to_string(k + 1));
  }

  for (const auto& block : report.acf) {
    std::string csv = "s,C\n";
    for (std::size_t i = 0; i < block.acf.lags.size(); ++i)
      csv += std::to_string(block.acf.lags[i]) + ',' + format_double(block.acf.values[i]) +
             '\n';
    files.emplace_back("acf_" + block.series + ".csv", std::move(csv));
  }

  std::filesystem::create_directories(out_dir);
  for (const auto& [name, content] : files) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    out << content;
  }
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path.string() + "' for hashing");
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + hex;
}

}  // namespace mfdfa
