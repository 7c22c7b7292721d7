#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfdfa/correlation.hpp"
#include "mfdfa/csv.hpp"
#include "mfdfa/dfa.hpp"
#include "mfdfa/spectrum.hpp"
#include "mfdfa/time_series.hpp"

namespace mfdfa {

enum class ReportFormat { json, csv };

/// One batch analysis run: ingestion, grids, fit regions, extrema windows and
/// surrogate settings. Defaults follow common practice for daily market
/// series: MF-DFA2, q in [-10, 10] step 0.5, scales in [6, N/5], extrema
/// windows of 5 and 10 trading days fitted over scales 5..75, one shuffled
/// surrogate.
struct PipelineConfig {
  std::filesystem::path input;
  std::string date_column = "date";
  std::string price_column = "price";
  bool input_is_returns = false;
  std::filesystem::path rates;  // optional currency-conversion series

  double q_min = -10.0;
  double q_max = 10.0;
  double q_step = 0.5;
  int s_min = 6;
  int s_max = 0;  // 0 -> N/5
  int detrend_order = 2;
  int scale_count = 30;

  std::vector<ScaleRange> regions;  // empty -> one region over the whole grid
  std::vector<int> extrema_windows = {5, 10};
  ScaleRange extrema_scales = {5, 75};  // upper bound clamped to N_seq/4

  int shuffle_count = 1;
  std::uint64_t base_seed = 42;

  std::filesystem::path out_dir;
  ReportFormat format = ReportFormat::json;

  void validate() const;  // throws config_error
};

/// Fit results of one (series, region) cell.
struct SeriesAnalysis {
  HurstSpectrum hurst;
  SingularitySpectrum spectrum;
  ComplexityParams complexity;
};

/// One table row: a series analyzed in one scale region, original plus
/// shuffled surrogates, with the attribution verdict against surrogate #1.
struct AnalysisBlock {
  std::string series;  // "total", "maxima_R5", "minima_R5", ...
  int region = 1;      // 1-based index within this series' fit regions
  ScaleRange fit_range;
  SeriesAnalysis original;
  std::vector<SeriesAnalysis> shuffles;
  std::optional<MultifractalityAttribution> attribution;
};

struct AcfBlock {
  std::string series;
  AutocorrelationResult acf;
  DecayClassification classification;
};

struct AnalysisReport {
  std::string input_path;
  std::string input_hash;  // fnv1a64 content digest of the input file
  std::string tool_version;
  PipelineConfig config;
  std::size_t n_input = 0;
  std::size_t n_returns = 0;
  std::vector<AcfBlock> acf;
  TailEstimate tail;
  std::vector<AnalysisBlock> analyses;
  std::map<std::string, FluctuationSurface> surfaces;  // per series, original
  std::vector<std::string> warnings;
};

/// Runs the whole chain: ingest -> returns -> normalize -> {ACF, tail} ->
/// MF-DFA per region -> Legendre -> complexity parameters; the same chain for
/// each extrema sequence (per window, maxima and minima) and for each
/// shuffled surrogate. Any stage error aborts with the stage name prefixed;
/// nothing is written to disk here.
AnalysisReport run_pipeline(const PipelineConfig& config);

/// Canonical report serialization. Deterministic: identical runs produce
/// byte-identical documents.
std::string report_to_json(const AnalysisReport& report);

/// Flat complexity-parameter table (one line per series x region).
std::string report_table_csv(const AnalysisReport& report);

/// Writes the report (report.json or table.csv) plus plot-ready CSVs:
/// fq_<series>.csv (s, q, F), hurst_*.csv (q, h, stderr), tau_*.csv (q, tau),
/// spectrum_*.csv (alpha, f), acf_<series>.csv (s, C). All content is built
/// in memory first, then written.
void write_report(const AnalysisReport& report,
                  const std::filesystem::path& out_dir, ReportFormat format);

/// FNV-1a 64-bit digest of a file, as "fnv1a64:<16 hex digits>".
std::string hash_file(const std::filesystem::path& path);

}  // namespace mfdfa
