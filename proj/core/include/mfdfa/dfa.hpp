#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mfdfa/errors.hpp"
#include "mfdfa/time_series.hpp"

namespace mfdfa {

/// Inclusive interval of scales s, in scale units.
struct ScaleRange {
  int lo = 0;
  int hi = 0;

  bool contains(int s) const noexcept { return s >= lo && s <= hi; }
};

/// Moment orders q, scales s and detrending order m of one analysis run.
/// Every scale must satisfy m + 2 <= s <= N/4 for a series of length N.
struct GridSpec {
  std::vector<double> q_values;
  std::vector<int> scales;
  int detrend_order = 2;

  /// q from -10 to 10 in steps of 0.5; ~30 log-spaced integer scales in
  /// [max(6, m + 2), n/5].
  static GridSpec make_default(std::size_t n, int detrend_order = 2);

  void validate(std::size_t n) const;  // throws config_error
};

/// Evenly spaced q grid, endpoints inclusive.
std::vector<double> q_grid(double q_min, double q_max, double q_step);

/// Log-spaced unique integer scales in [lo, hi], at most `count` of them.
std::vector<int> log_spaced_scales(int lo, int hi, int count = 30);

/// Mean squared detrending residuals F^2(p, s) of the 2*Ns segments at one
/// scale: segments 1..Ns tile the profile from the start, Ns+1..2*Ns from the
/// end. The local trend is an order-m least-squares polynomial, solved via an
/// orthogonalized basis (stable for m >= 3 on long segments).
std::vector<double> segment_variances(const Profile& prof, int scale,
                                      int detrend_order);

/// Fluctuation function F_q(s) over the full (q, s) grid.
///
/// Zero-variance segments are floored at 1e-300 before the moment average;
/// affected cells (all q <= 0 at that scale) are listed in degenerate_cells
/// and described in warnings. A scale where every segment has zero variance
/// raises numeric_error.
struct FluctuationSurface {
  GridSpec grid;
  std::vector<double> values;   // row-major: values[qi * n_scales + si] > 0
  std::vector<int> n_segments;  // 2*Ns for each scale
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_cells;  // (qi, si)
  std::vector<std::string> warnings;

  double at(std::size_t qi, std::size_t si) const {
    return values[qi * grid.scales.size() + si];
  }
};

FluctuationSurface fluctuation_surface(const Profile& prof, const GridSpec& grid);

/// Generalized Hurst exponents h(q) fitted over one scale interval, with the
/// derived exponents tau(q) = q h(q) - 1, gamma = 2 - 2 h(2) and
/// beta = 2 h(2) - 1. gamma/beta are NaN when q = 2 is outside the grid.
struct HurstSpectrum {
  std::vector<double> q_values;
  std::vector<double> h;
  std::vector<double> h_se;  // standard error of each slope
  std::vector<double> tau;
  ScaleRange fit_range;
  double h2 = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
};

/// Least-squares slope of ln F_q(s) vs ln s per q over the scales inside
/// fit_range. Requires at least 4 scales in range.
HurstSpectrum fit_hurst(const FluctuationSurface& surface, ScaleRange fit_range);

/// Mass exponents tau(q) from the box-probability partition function of a
/// non-negative measure: Z_q(s) = sum_p P(p,s)^q ~ s^tau(q). Boxes are the
/// first floor(N/s) windows of length s; the remainder is dropped, so dyadic
/// lengths and scales give exact box sums. Independent of the detrending
/// path, which makes it a cross-check oracle for fit_hurst.
struct PartitionTau {
  std::vector<double> q_values;
  std::vector<double> tau;
  std::vector<double> tau_se;
};

PartitionTau partition_tau(const TimeSeries& measure,
                           const std::vector<int>& scales,
                           const std::vector<double>& q_values);

}  // namespace mfdfa
