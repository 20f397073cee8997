#pragma once

#include <array>
#include <vector>

#include "fol/foliated.hpp"

namespace fol {

inline constexpr double kDecayNoiseFloor = 1e-12;

struct SeminormProfile {
  std::vector<double> scales;
  std::vector<double> values;
  /// max over scales
  double value = 0.0;
  /// the finest scale exceeds twice the next one
  bool infinite = false;
};

/// 0.1 * 4^-k, k = 0..5.
std::vector<double> default_seminorm_scales();

/// max |f(x) - f(y)| / s^beta over base points on a 64 x 64 grid and y the
/// point at arclength +-s along the integral curve of `field` through x.
SeminormProfile leafwise_holder_seminorm(const Observable2D& f, const DirectionField& field, double beta,
                                         const std::vector<double>& scales = default_seminorm_scales());

/// C_n = sum w f(T^n x) (g(x) - g_mean) over the support of mu0, n = 0..n_max,
/// with fixed-order compensated sums. Equal to the usual covariance when mu0
/// is invariant, and free of the f-mean drift when it is not.
std::vector<double> correlation_sequence(const ToralMap& map, const Observable2D& f, const Observable2D& g,
                                         const DiscreteMeasure& mu0, int n_max);

/// Last n such that every entry up to n agrees between two quadrature
/// resolutions, |a_n - b_n| <= rel |b_n| + abs; -1 if C_0 already differs.
int agreeing_prefix(const std::vector<double>& a, const std::vector<double>& b, double rel = 0.05,
                    double abs = 1e-13);

using Frequency = std::array<long, 2>;

/// Least n1 such that (A^T)^n k + l != 0 for all n in [n1, n_max] and all
/// nonzero frequency pairs; the correlation of the trigonometric polynomials
/// vanishes from there on.
int frequency_escape_time(const Mat2& linear, const std::vector<Frequency>& f_freqs,
                          const std::vector<Frequency>& g_freqs, int n_max);

struct DecayFit {
  double C = 0.0;
  double rate = 0.0;
  int n_lo = 0;
  int n_hi = 0;
  /// RMS residual of log|C_n| about the fitted line
  double residual = 0.0;
  int used = 0;
};

/// Least squares of log|C_n| on n over n in [n_lo, n_hi] with |C_n| above the
/// noise floor. Throws InsufficientData below 4 usable entries.
DecayFit fit_decay(const std::vector<double>& values, int n_lo = 0, int n_hi = -1);

}  // namespace fol
