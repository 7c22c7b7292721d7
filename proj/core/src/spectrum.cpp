#include "mfdfa/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mfdfa {

namespace {

constexpr double k_nan = std::numeric_limits<double>::quiet_NaN();

double poly_eval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
  std::vector<double> d(coeffs.size() > 1 ? coeffs.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d[k - 1] = coeffs[k] * static_cast<double>(k);
  return d;
}

// Taylor shift: coefficients of p(x + x0) from coefficients of p(x),
// by repeated synthetic division. Exact up to rounding.
std::vector<double> poly_shift(std::vector<double> coeffs, double x0) {
  const std::size_t d = coeffs.size();
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = d - 1; k-- > j;) coeffs[k] += x0 * coeffs[k + 1];
  return coeffs;
}

// Argmax of the polynomial over [lo, hi]: dense scan, then bisection on the
// derivative when the best sample is interior.
double poly_argmax(const std::vector<double>& coeffs, double lo, double hi) {
  constexpr int n_samples = 2048;
  double best_x = lo;
  double best_f = poly_eval(coeffs, lo);
  for (int i = 1; i <= n_samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / n_samples;
    const double f = poly_eval(coeffs, x);
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  if (best_x == lo || best_x == hi) return best_x;

  const auto deriv = poly_derivative(coeffs);
  double a = best_x - (hi - lo) / n_samples;
  double b = best_x + (hi - lo) / n_samples;
  double fa = poly_eval(deriv, a);
  double fb = poly_eval(deriv, b);
  if (!(fa > 0.0 && fb < 0.0)) return best_x;  // flat or noisy: keep the sample
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(best_x)); ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = poly_eval(deriv, mid);
    if (fm > 0.0) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

// First zero crossing of the polynomial walking outward from x0 in the given
// direction; bisected to 1e-10. NaN when no sign change within `limit`.
double find_root_outward(const std::vector<double>& coeffs, double x0, double step,
                         double limit, int direction) {
  const double f0 = poly_eval(coeffs, x0);
  if (!(f0 > 0.0)) return k_nan;
  double prev = x0;
  const int n_steps = static_cast<int>(std::ceil(limit / step));
  for (int i = 1; i <= n_steps; ++i) {
    const double x = x0 + direction * std::min(i * step, limit);
    if (poly_eval(coeffs, x) <= 0.0) {
      double a = prev, b = x;
      for (int it = 0; it < 200 && std::abs(b - a) > 1e-10; ++it) {
        const double mid = 0.5 * (a + b);
        if (poly_eval(coeffs, mid) > 0.0)
          a = mid;
        else
          b = mid;
      }
      return 0.5 * (a + b);
    }
    prev = x;
  }
  return k_nan;
}

}  // namespace

std::size_t SingularitySpectrum::n_valid() const noexcept {
  std::size_t n = 0;
  for (bool fl : flagged)
    if (!fl) ++n;
  return n;
}

SingularitySpectrum legendre_transform(const HurstSpectrum& hs, double monotone_tol) {
  const std::size_t n = hs.q_values.size();
  if (n < 3) throw config_error("Legendre transform needs at least 3 q points");
  for (double t : hs.tau)
    if (!std::isfinite(t)) throw numeric_error("tau(q) not finite: cannot transform");

  SingularitySpectrum spec;
  spec.source_q = hs.q_values;
  spec.alpha.resize(n);
  spec.f.resize(n);
  spec.flagged.assign(n, false);

  // alpha = dtau/dq by central differences, one-sided at the ends.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = (i == 0) ? 0 : i - 1;
    const std::size_t hi = (i == n - 1) ? n - 1 : i + 1;
    spec.alpha[i] = (hs.tau[hi] - hs.tau[lo]) / (hs.q_values[hi] - hs.q_values[lo]);
    spec.f[i] = hs.q_values[i] * spec.alpha[i] - hs.tau[i];
  }

  // Concavity of tau demands alpha non-increasing in q; violations are fit
  // noise and get flagged, never dropped.
  double last_good = spec.alpha[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (spec.alpha[i] <= last_good + monotone_tol) {
      last_good = spec.alpha[i];
    } else {
      spec.flagged[i] = true;
    }
  }
  if (spec.n_valid() <= 1)
    throw numeric_error("Legendre transform failed: alpha(q) is not monotone anywhere");
  return spec;
}

ComplexityParams fit_spectrum(const SingularitySpectrum& spec, SpectrumFitKind kind) {
  const int degree = (kind == SpectrumFitKind::quadratic) ? 2 : 4;
  const std::size_t min_points = (kind == SpectrumFitKind::quadratic) ? 5 : 7;

  std::vector<double> alpha, f;
  for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
    if (!spec.flagged[i]) {
      alpha.push_back(spec.alpha[i]);
      f.push_back(spec.f[i]);
    }
  }
  if (alpha.size() < min_points)
    throw numeric_error("spectrum fit needs >= " + std::to_string(min_points) +
                        " valid points, got " + std::to_string(alpha.size()));

  const auto [lo_it, hi_it] = std::minmax_element(alpha.begin(), alpha.end());
  const double a_lo = *lo_it, a_hi = *hi_it;
  const double a_range = a_hi - a_lo;
  if (!(a_range > 0.0))
    throw numeric_error("spectrum fit undefined: all alpha coincide");

  // Least squares in the centered/scaled variable u = (alpha - mid) / half
  // for conditioning; QR keeps exact polynomial samples exactly recoverable.
  const double mid = 0.5 * (a_lo + a_hi);
  const double half = 0.5 * a_range;
  const std::size_t n = alpha.size();
  Eigen::MatrixXd vand(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (alpha[i] - mid) / half;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      vand(static_cast<Eigen::Index>(i), k) = p;
      p *= u;
    }
    rhs(static_cast<Eigen::Index>(i)) = f[i];
  }
  const Eigen::VectorXd sol = vand.colPivHouseholderQr().solve(rhs);
  std::vector<double> coeffs_u(sol.data(), sol.data() + degree + 1);

  const double u0 = poly_argmax(coeffs_u, -1.0, 1.0);
  const double alpha0 = mid + half * u0;

  // Recenter about the maximum and rescale to alpha units:
  // f = sum c_k ((alpha - alpha0)/half)^k = sum (c_k / half^k) (alpha-alpha0)^k.
  const std::vector<double> shifted = poly_shift(coeffs_u, u0);
  ComplexityParams params;
  params.fit_kind = kind;
  params.alpha0 = alpha0;
  params.width = k_nan;
  params.skew = k_nan;
  params.alpha_min = k_nan;
  params.alpha_max = k_nan;
  double scale = 1.0;
  for (int k = 0; k <= degree; ++k) {
    params.coeffs[static_cast<std::size_t>(k)] = shifted[static_cast<std::size_t>(k)] / scale;
    scale *= half;
  }

  // Width: the two fitted roots bracketing alpha0, searched outward within
  // twice the empirical alpha range.
  std::vector<double> about_alpha0(params.coeffs.begin(),
                                   params.coeffs.begin() + degree + 1);
  const double step = a_range / 64.0;
  const double limit = 2.0 * a_range;
  const double t_right = find_root_outward(about_alpha0, 0.0, step, limit, +1);
  const double t_left = find_root_outward(about_alpha0, 0.0, step, limit, -1);
  if (std::isnan(t_right) || std::isnan(t_left))
    throw width_undefined_error(
        "width undefined: fitted spectrum has no zero crossings bracketing alpha0 "
        "within twice the data range",
        params);

  params.alpha_max = alpha0 + t_right;
  params.alpha_min = alpha0 + t_left;  // t_left <= 0
  params.width = params.alpha_max - params.alpha_min;
  params.skew = (params.alpha_max - alpha0) / (alpha0 - params.alpha_min);
  return params;
}

MultifractalityAttribution compare_surrogate(const HurstSpectrum& original_h,
                                             const ComplexityParams& original_p,
                                             const HurstSpectrum& shuffled_h,
                                             const ComplexityParams& shuffled_p) {
  if (original_h.q_values.size() != shuffled_h.q_values.size())
    throw config_error("incompatible inputs: q grids differ in size");
  for (std::size_t i = 0; i < original_h.q_values.size(); ++i)
    if (std::abs(original_h.q_values[i] - shuffled_h.q_values[i]) > 1e-12)
      throw config_error("incompatible inputs: q grids differ");
  if (original_h.fit_range.lo != shuffled_h.fit_range.lo ||
      original_h.fit_range.hi != shuffled_h.fit_range.hi)
    throw config_error("incompatible inputs: fit ranges differ");

  MultifractalityAttribution out;
  out.delta_h.resize(original_h.h.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < original_h.h.size(); ++i) {
    out.delta_h[i] = original_h.h[i] - shuffled_h.h[i];
    acc += std::abs(out.delta_h[i]);
  }
  out.mean_abs_delta_h = acc / static_cast<double>(out.delta_h.size());
  out.delta_width = original_p.width - shuffled_p.width;
  out.delta_alpha0 = original_p.alpha0 - shuffled_p.alpha0;

  if (out.mean_abs_delta_h > 0.1)
    out.verdict = Attribution::correlation_dominated;
  else if (out.mean_abs_delta_h < 0.03)
    out.verdict = Attribution::fat_tail_dominated;
  else
    out.verdict = Attribution::mixed;
  return out;
}

std::string to_string(Attribution verdict) {
  switch (verdict) {
    case Attribution::correlation_dominated:
      return "correlation-dominated";
    case Attribution::fat_tail_dominated:
      return "fat-tail-dominated";
    case Attribution::mixed:
      return "mixed";
  }
  return "mixed";
}

std::string to_string(SpectrumFitKind kind) {
  return kind == SpectrumFitKind::quadratic ? "quadratic" : "quartic";
}

}  // namespace mfdfa
