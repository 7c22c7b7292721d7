#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mfdfa/dfa.hpp"

namespace mfdfa {

/// Singularity spectrum f(alpha) obtained from tau(q) by a numerical
/// Legendre transform: alpha = dtau/dq (central differences, one-sided at the
/// endpoints), f = q*alpha - tau. alpha must be non-increasing in q; points
/// breaking monotonicity (fit noise at extreme |q|) are flagged, kept in the
/// output, and excluded from downstream fits.
struct SingularitySpectrum {
  std::vector<double> alpha;
  std::vector<double> f;
  std::vector<double> source_q;
  std::vector<bool> flagged;

  std::size_t n_valid() const noexcept;
};

SingularitySpectrum legendre_transform(const HurstSpectrum& hs,
                                       double monotone_tol = 1e-9);

enum class SpectrumFitKind { quadratic, quartic };

/// Shape parameters of one singularity spectrum:
///   alpha0  position of the fitted maximum
///   width   W = alpha_max - alpha_min, distance between the fitted roots
///   skew    r = (alpha_max - alpha0) / (alpha0 - alpha_min)
///   coeffs  A..E of f(a) = A + B(a-alpha0) + ... + E(a-alpha0)^4
/// B and D are the first/third-order asymmetry coefficients (D carries the
/// skew for quartic fits; B is nonzero only for boundary maxima).
struct ComplexityParams {
  double alpha0 = 0.0;
  double width = 0.0;
  double skew = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  std::array<double, 5> coeffs{};  // A, B, C, D, E
  SpectrumFitKind fit_kind = SpectrumFitKind::quartic;
};

/// Thrown when the fitted polynomial has no pair of roots bracketing alpha0
/// within twice the empirical alpha range; carries everything computed up to
/// that point (width, skew and the roots are NaN).
class width_undefined_error : public numeric_error {
 public:
  width_undefined_error(const std::string& message, ComplexityParams partial)
      : numeric_error(message), partial_(partial) {}

  const ComplexityParams& partial() const noexcept { return partial_; }

 private:
  ComplexityParams partial_;
};

/// Fits a quadratic or quartic to the unflagged (alpha, f) points. alpha0 is
/// the argmax of the fitted polynomial over the data interval; the roots of
/// the fit around alpha0 define the spectrum width, located by outward search
/// plus bisection to 1e-10. Needs >= 5 valid points (>= 7 for quartic).
ComplexityParams fit_spectrum(const SingularitySpectrum& spec,
                              SpectrumFitKind kind);

enum class Attribution { correlation_dominated, fat_tail_dominated, mixed };

/// Original-vs-surrogate comparison. Shuffling destroys temporal correlation
/// but preserves the value distribution, so the h(q) gap separates the two
/// multifractality sources:
///   mean |dh(q)| > 0.1   correlation_dominated
///   mean |dh(q)| < 0.03  fat_tail_dominated
///   otherwise            mixed
struct MultifractalityAttribution {
  std::vector<double> delta_h;  // h_original(q) - h_shuffled(q)
  double mean_abs_delta_h = 0.0;
  double delta_width = 0.0;
  double delta_alpha0 = 0.0;
  Attribution verdict = Attribution::mixed;
};

MultifractalityAttribution compare_surrogate(const HurstSpectrum& original_h,
                                             const ComplexityParams& original_p,
                                             const HurstSpectrum& shuffled_h,
                                             const ComplexityParams& shuffled_p);

std::string to_string(Attribution verdict);
std::string to_string(SpectrumFitKind kind);

}  // namespace mfdfa
