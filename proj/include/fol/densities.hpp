#pragma once

#include <functional>
#include <vector>

#include "fol/maps.hpp"

namespace fol {

using Observable1D = std::function<double(double)>;

inline constexpr int kDefaultDensityGrid = 4096;

/// Positive density on the circle sampled at i/N, periodic linear interpolation.
/// Samples are normalized so that the periodic trapezoid integral is 1.
class HolderDensity {
 public:
  HolderDensity() = default;
  HolderDensity(std::vector<double> samples, double alpha);

  static HolderDensity constant(int grid_size, double alpha = 1.0);
  static HolderDensity from_function(int grid_size, const Observable1D& f, double alpha = 1.0);

  int size() const { return static_cast<int>(samples_.size()); }
  const std::vector<double>& samples() const { return samples_; }
  double alpha() const { return alpha_; }
  /// Trapezoid integral of the samples as given, before normalization.
  double raw_integral() const { return raw_integral_; }
  double operator()(double x) const;
  double min() const;

 private:
  std::vector<double> samples_;
  double alpha_ = 1.0;
  double raw_integral_ = 1.0;
};

/// Periodic trapezoid rule.
double grid_integral(const std::vector<double>& samples);

/// Transfer operator of an expanding map on an N-point grid.
///
/// Sample i is the cell average of L rho over [(i-1/2)/N, (i+1/2)/N]. The
/// cell's preimage is a union of k intervals bounded by lifted preimages of
/// the cell edges, and rho's piecewise-linear interpolant is integrated over
/// them exactly. Total mass is therefore conserved up to rounding.
class TransferOperator {
 public:
  TransferOperator(const ExpandingMap1D& map, int grid_size = kDefaultDensityGrid);

  int grid_size() const { return grid_size_; }
  const ExpandingMap1D& map() const { return map_; }
  /// Mass-conserving application to arbitrary (possibly signed) samples.
  std::vector<double> apply(const std::vector<double>& samples) const;
  /// Application followed by renormalization to integral 1.
  HolderDensity apply(const HolderDensity& rho) const;

 private:
  ExpandingMap1D map_;
  int grid_size_;
  // kN+1 increasing lifted preimages of the cell edges, in grid units
  std::vector<double> edges_;
};

HolderDensity transfer_apply(const ExpandingMap1D& map, const HolderDensity& rho);

struct ConeConstants {
  double lambda_alpha = 0.0;
  double distortion = 0.0;
  double K0 = 0.0;
  int n0 = 1;
  double tau = 0.0;
  double theta = 0.0;

  /// h(K) = (K + H) lambda^alpha
  double h(double K) const { return (K + distortion) * lambda_alpha; }
};

ConeConstants cone_constants(double lambda_alpha, double distortion);
ConeConstants cone_constants(const ExpandingMap1D& map);

struct InvariantDensity {
  HolderDensity density;
  double residual = 0.0;
  int iterations = 0;
  /// measured log-Hoelder constant of the fixed point and the bound K0/2 * 1.1
  double log_holder = 0.0;
  double log_holder_bound = 0.0;
  bool regularity_ok = false;
};

InvariantDensity invariant_density(const ExpandingMap1D& map, double tol, int grid_size = kDefaultDensityGrid);
InvariantDensity invariant_density(const TransferOperator& op, double tol);

/// Per-scale maxima of |log rho(x) - log rho(x+s)| / s^alpha, s = 2^-3 .. 2^-12.
std::vector<double> holder_log_profile(const HolderDensity& rho, double alpha);
double holder_log_constant(const HolderDensity& rho, double alpha);

/// Empirical Hoelder seminorm of an observable, same dyadic scheme.
double holder_seminorm(const Observable1D& f, double alpha);

/// The residual density (rho - tau) / (1 - tau).
HolderDensity coupling_residual(const HolderDensity& rho, double tau);

/// C_n = int f o T^n g d mu0 - int f d mu0 int g d mu0, n = 0..n_max.
std::vector<double> expanding_decay(const TransferOperator& op, const HolderDensity& rho0, const Observable1D& f,
                                    const Observable1D& g, int n_max);
std::vector<double> expanding_decay(const ExpandingMap1D& map, const Observable1D& f, const Observable1D& g,
                                    int n_max, double tol = 1e-11);

}  // namespace fol
