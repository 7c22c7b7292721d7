#include "mfdfa/dfa.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "linreg.hpp"

namespace mfdfa {

namespace {

constexpr double k_variance_floor = 1e-300;

// Orthonormal basis spanning polynomials of degree <= m on the shared
// segment abscissa, via Householder QR of a centered/scaled Vandermonde
// matrix. One factorization serves every segment of the scale.
Eigen::MatrixXd detrend_basis(int s, int m) {
  Eigen::MatrixXd v(s, m + 1);
  for (int i = 0; i < s; ++i) {
    const double x = (2.0 * i - (s - 1)) / static_cast<double>(s - 1);
    double p = 1.0;
    for (int j = 0; j <= m; ++j) {
      v(i, j) = p;
      p *= x;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  return qr.householderQ() * Eigen::MatrixXd::Identity(s, m + 1);
}

double segment_residual_variance(const Eigen::MatrixXd& basis, const double* data,
                                 int s) {
  Eigen::Map<const Eigen::VectorXd> y(data, s);
  const Eigen::VectorXd coeffs = basis.transpose() * y;
  const Eigen::VectorXd residual = y - basis * coeffs;
  return residual.squaredNorm() / static_cast<double>(s);
}

double interpolate_h_at(const std::vector<double>& q, const std::vector<double>& h,
                        double q_target) {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (std::abs(q[i] - q_target) < 1e-12) return h[i];
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i - 1] < q_target && q_target < q[i]) {
      const double w = (q_target - q[i - 1]) / (q[i] - q[i - 1]);
      return h[i - 1] + w * (h[i] - h[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<double> q_grid(double q_min, double q_max, double q_step) {
  if (!(q_step > 0.0) || q_max < q_min)
    throw config_error("invalid q grid: need q_min <= q_max and q_step > 0");
  const int count = static_cast<int>(std::floor((q_max - q_min) / q_step + 1e-9)) + 1;
  std::vector<double> q(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) q[static_cast<std::size_t>(i)] = q_min + i * q_step;
  return q;
}

std::vector<int> log_spaced_scales(int lo, int hi, int count) {
  if (lo < 2 || hi < lo)
    throw config_error("invalid scale bounds [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  if (count < 2) throw config_error("scale count must be >= 2");
  std::vector<int> scales;
  scales.reserve(static_cast<std::size_t>(count));
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    const int s =
        static_cast<int>(std::lround(std::exp(log_lo + t * (log_hi - log_lo))));
    if (scales.empty() || s > scales.back()) scales.push_back(s);
  }
  return scales;
}

GridSpec GridSpec::make_default(std::size_t n, int detrend_order) {
  GridSpec grid;
  grid.detrend_order = detrend_order;
  grid.q_values = q_grid(-10.0, 10.0, 0.5);
  const int lo = std::max(6, detrend_order + 2);
  const int hi = static_cast<int>(n / 5);
  grid.scales = log_spaced_scales(lo, hi);
  grid.validate(n);
  return grid;
}

void GridSpec::validate(std::size_t n) const {
  if (detrend_order < 1) throw config_error("detrend order must be >= 1");
  if (q_values.empty()) throw config_error("empty q grid");
  for (double q : q_values)
    if (!std::isfinite(q)) throw config_error("non-finite q value in grid");
  for (std::size_t i = 1; i < q_values.size(); ++i)
    if (!(q_values[i] > q_values[i - 1]))
      throw config_error("q grid must be strictly increasing");
  if (scales.size() < 2) throw config_error("need at least 2 scales");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (scales[i] <= scales[i - 1])
      throw config_error("scales must be strictly increasing");
  for (int s : scales) {
    if (s < detrend_order + 2)
      throw config_error("scale " + std::to_string(s) +
                         " below m+2 = " + std::to_string(detrend_order + 2) +
                         ": fluctuation function undefined");
    if (static_cast<std::size_t>(s) * 4 > n)
      throw config_error("scale " + std::to_string(s) + " exceeds N/4 = " +
                         std::to_string(n / 4) + ": statistically unstable");
  }
}

std::vector<double> segment_variances(const Profile& prof, int scale,
                                      int detrend_order) {
  const std::size_t n = prof.size();
  if (detrend_order < 1) throw config_error("detrend order must be >= 1");
  if (scale < detrend_order + 2)
    throw config_error("scale " + std::to_string(scale) + " below m+2 = " +
                       std::to_string(detrend_order + 2));
  // The s <= N/4 stability bound is a grid policy (GridSpec::validate); here
  // only the segment arithmetic itself must be possible.
  if (static_cast<std::size_t>(scale) > n)
    throw config_error("scale too large: " + std::to_string(scale) +
                       " exceeds series length " + std::to_string(n));

  const std::size_t s = static_cast<std::size_t>(scale);
  const std::size_t n_seg = n / s;  // floor
  const Eigen::MatrixXd basis = detrend_basis(scale, detrend_order);

  std::vector<double> f2(2 * n_seg);
  const double* data = prof.cumulative.data();
  // Segments 1..Ns tile from the start; Ns+1..2Ns tile from the opposite end
  // so the trailing remainder is not discarded.
  for (std::size_t p = 0; p < n_seg; ++p)
    f2[p] = segment_residual_variance(basis, data + p * s, scale);
  for (std::size_t j = 0; j < n_seg; ++j)
    f2[n_seg + j] = segment_residual_variance(basis, data + (n - (j + 1) * s), scale);
  return f2;
}

FluctuationSurface fluctuation_surface(const Profile& prof, const GridSpec& grid) {
  grid.validate(prof.size());

  const std::size_t n_q = grid.q_values.size();
  const std::size_t n_s = grid.scales.size();

  FluctuationSurface surface;
  surface.grid = grid;
  surface.values.assign(n_q * n_s, 0.0);
  surface.n_segments.resize(n_s);

  std::vector<double> log_f2;
  for (std::size_t si = 0; si < n_s; ++si) {
    const int s = grid.scales[si];
    const std::vector<double> f2 = segment_variances(prof, s, grid.detrend_order);
    const std::size_t n_seg = f2.size();
    surface.n_segments[si] = static_cast<int>(n_seg);

    std::size_t n_zero = 0;
    log_f2.resize(n_seg);
    for (std::size_t p = 0; p < n_seg; ++p) {
      if (f2[p] < k_variance_floor) {
        ++n_zero;
        log_f2[p] = std::log(k_variance_floor);
      } else {
        log_f2[p] = std::log(f2[p]);
      }
    }
    if (n_zero == n_seg)
      throw numeric_error("degenerate surface: all segments at scale " +
                          std::to_string(s) + " have zero variance");
    if (n_zero > 0) {
      // The floor dominates the generalized mean for q <= 0: flag those cells.
      for (std::size_t qi = 0; qi < n_q; ++qi)
        if (grid.q_values[qi] <= 0.0) surface.degenerate_cells.emplace_back(qi, si);
      surface.warnings.push_back(
          "scale " + std::to_string(s) + ": " + std::to_string(n_zero) + " of " +
          std::to_string(n_seg) +
          " segments have zero variance; cells with q <= 0 are floored and flagged");
    }

    // Moments evaluated in log space (shifted log-sum-exp), so extreme q
    // neither overflows nor underflows. Fixed summation order per cell keeps
    // results independent of any outer parallelism.
    for (std::size_t qi = 0; qi < n_q; ++qi) {
      const double q = grid.q_values[qi];
      double log_fq;
      if (q == 0.0) {
        double acc = 0.0;
        for (double lv : log_f2) acc += lv;
        log_fq = 0.5 * acc / static_cast<double>(n_seg);
      } else {
        const double a = 0.5 * q;
        double shift = -std::numeric_limits<double>::infinity();
        for (double lv : log_f2) shift = std::max(shift, a * lv);
        double acc = 0.0;
        for (double lv : log_f2) acc += std::exp(a * lv - shift);
        log_fq = (shift + std::log(acc / static_cast<double>(n_seg))) / q;
      }
      surface.values[qi * n_s + si] = std::exp(log_fq);
    }

    // Moment monotonicity of the generalized mean, up to rounding.
    for (std::size_t qi = 1; qi < n_q; ++qi) {
      const double lo = surface.values[(qi - 1) * n_s + si];
      const double hi = surface.values[qi * n_s + si];
      if (hi < lo * (1.0 - 1e-9))
        throw numeric_error("fluctuation surface violates moment monotonicity at scale " +
                            std::to_string(s));
    }
  }
  return surface;
}

HurstSpectrum fit_hurst(const FluctuationSurface& surface, ScaleRange fit_range) {
  const auto& grid = surface.grid;
  std::vector<std::size_t> idx;
  for (std::size_t si = 0; si < grid.scales.size(); ++si)
    if (fit_range.contains(grid.scales[si])) idx.push_back(si);
  if (idx.size() < 4)
    throw config_error("insufficient scales: fit range [" +
                       std::to_string(fit_range.lo) + ", " + std::to_string(fit_range.hi) +
                       "] holds " + std::to_string(idx.size()) + " of " +
                       std::to_string(grid.scales.size()) + " scales, need >= 4");

  std::vector<double> log_s(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    log_s[k] = std::log(static_cast<double>(grid.scales[idx[k]]));

  HurstSpectrum hs;
  hs.q_values = grid.q_values;
  hs.fit_range = fit_range;
  hs.h.resize(grid.q_values.size());
  hs.h_se.resize(grid.q_values.size());
  hs.tau.resize(grid.q_values.size());

  std::vector<double> log_f(idx.size());
  for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi) {
    for (std::size_t k = 0; k < idx.size(); ++k)
      log_f[k] = std::log(surface.at(qi, idx[k]));
    const auto fit = detail::fit_line(log_s, log_f);
    hs.h[qi] = fit.slope;
    hs.h_se[qi] = fit.slope_se;
    hs.tau[qi] = grid.q_values[qi] * fit.slope - 1.0;
  }

  hs.h2 = interpolate_h_at(hs.q_values, hs.h, 2.0);
  hs.gamma = 2.0 - 2.0 * hs.h2;
  hs.beta = 2.0 * hs.h2 - 1.0;
  return hs;
}

PartitionTau partition_tau(const TimeSeries& measure, const std::vector<int>& scales,
                           const std::vector<double>& q_values) {
  validate_series(measure);
  const std::size_t n = measure.size();
  for (std::size_t i = 0; i < n; ++i)
    if (measure.values[i] < 0.0)
      throw config_error("partition function needs a non-negative measure; value at index " +
                         std::to_string(i) + " is negative");
  if (scales.size() < 2) throw config_error("need at least 2 scales for tau(q)");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (scales[i] <= scales[i - 1])
      throw config_error("scales must be strictly increasing");
  if (scales.front() < 1 || static_cast<std::size_t>(scales.back()) > n / 2)
    throw config_error("partition scales must lie in [1, N/2]");
  if (q_values.empty()) throw config_error("empty q grid");

  double total = 0.0;
  for (double v : measure.values) total += v;
  if (!(total > 0.0)) throw numeric_error("measure sums to zero: tau(q) undefined");

  // ln Z(q, s); boxes are summed directly rather than differenced from a
  // prefix sum, so an all-zero box is exactly zero and box sums carry no
  // cancellation error.
  const std::size_t n_q = q_values.size();
  const std::size_t n_scales = scales.size();
  std::vector<double> ln_z(n_q * n_scales);
  std::vector<double> box_sums;
  std::vector<double> log_p;

  for (std::size_t si = 0; si < n_scales; ++si) {
    const std::size_t s = static_cast<std::size_t>(scales[si]);
    const std::size_t n_boxes = n / s;  // trailing remainder dropped
    box_sums.assign(n_boxes, 0.0);
    for (std::size_t p = 0; p < n_boxes; ++p) {
      double acc = 0.0;
      const double* v = measure.values.data() + p * s;
      for (std::size_t i = 0; i < s; ++i) acc += v[i];
      box_sums[p] = acc;
    }

    log_p.clear();
    for (double p : box_sums)
      if (p > 0.0) log_p.push_back(std::log(p));
    if (log_p.empty())
      throw numeric_error("all boxes excluded at scale " + std::to_string(s) +
                          ": zero measure in every box");

    for (std::size_t qi = 0; qi < n_q; ++qi) {
      const double q = q_values[qi];
      double lz;
      if (q == 0.0) {
        lz = std::log(static_cast<double>(log_p.size()));  // non-empty box count
      } else {
        double shift = -std::numeric_limits<double>::infinity();
        for (double lp : log_p) shift = std::max(shift, q * lp);
        double acc = 0.0;
        for (double lp : log_p) acc += std::exp(q * lp - shift);
        lz = shift + std::log(acc);
      }
      ln_z[qi * n_scales + si] = lz;
    }
  }

  std::vector<double> log_s(n_scales);
  for (std::size_t si = 0; si < n_scales; ++si)
    log_s[si] = std::log(static_cast<double>(scales[si]));

  PartitionTau result;
  result.q_values = q_values;
  result.tau.resize(n_q);
  result.tau_se.resize(n_q);
  std::vector<double> y(n_scales);
  for (std::size_t qi = 0; qi < n_q; ++qi) {
    for (std::size_t si = 0; si < n_scales; ++si) y[si] = ln_z[qi * n_scales + si];
    const auto fit = detail::fit_line(log_s, y);
    result.tau[qi] = fit.slope;
    result.tau_se[qi] = fit.slope_se;
  }
  return result;
}

}  // namespace mfdfa
