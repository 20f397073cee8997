#pragma once

#include <functional>
#include <vector>

#include "fol/maps.hpp"
#include "fol/transport.hpp"

namespace fol {

using Observable2D = std::function<double(Vec2)>;

inline constexpr double kLeafCap = 0.45;
inline constexpr double kLeafSpacing = kLeafCap / 256;

/// A piece of leaf: lifted polyline sampled at (nearly) uniform arclength
/// spacing ds, with a positive density normalized to trapezoid integral 1
/// and a weight equal to the segment's mass.
struct LeafSegment {
  std::vector<Vec2> points;
  std::vector<double> density;
  double ds = 0.0;
  double weight = 0.0;

  double length() const { return ds * static_cast<double>(points.size() - 1); }
};

struct FoliatedMeasure {
  std::vector<LeafSegment> segments;
  double beta = 1.0;
  double declared_K = 0.0;

  double total_mass() const;
};

/// Straight segment from base along dir; `density` is a function of arclength
/// and is normalized here.
LeafSegment make_segment(Vec2 base, Vec2 dir, double length, const std::function<double(double)>& density,
                         double weight, double spacing = kLeafSpacing);

/// Lebesgue measure as uniform densities on parallel chords of the unit
/// square along `dir`, spaced `chord_spacing` apart and cut to kLeafCap.
FoliatedMeasure lebesgue_foliated(Vec2 dir, double chord_spacing, double beta);

/// Trapezoid integral of the density times ds.
double leaf_integral(const std::vector<double>& values, double ds);

/// Empirical log-Hoelder constant of positive samples at spacing ds, over
/// pairs separated by 1, 2, 4, ... samples.
double sampled_log_holder(const std::vector<double>& values, double ds, double beta);

struct RegularityEstimate {
  double K_density = 0.0;
  double K_graph = 0.0;
};

/// K_graph is the Hoelder constant of the tangent angle measured from `frame`.
RegularityEstimate regularity_estimate(const FoliatedMeasure& mu, Vec2 frame);

/// Max over segments of the log-Hoelder constant of f restricted to the leaves.
double leafwise_log_holder(const FoliatedMeasure& mu, const Observable2D& f);

/// Multiplies leaf densities by rho and renormalizes; declared K grows by the
/// measured leafwise constant of log rho.
FoliatedMeasure reweight(const FoliatedMeasure& mu, const Observable2D& rho);

/// Pushes each leaf forward, resamples in arclength, divides densities by the
/// leafwise expansion and cuts pieces longer than kLeafCap. Declared K follows
/// K -> lambda' (K + H) with lambda' = (min unstable expansion)^-beta.
FoliatedMeasure leaf_pushforward(const ToralMap& map, const FoliatedMeasure& mu, int steps, double H = 0.0);

struct WeightedPoints {
  std::vector<Vec2> points;
  std::vector<double> masses;
};

/// Quadrature nodes of the leaves with their masses (wrapped to [0,1)^2).
WeightedPoints quadrature_points(const FoliatedMeasure& mu);

/// Bilinear deposit onto the g x g cell-centre grid.
DiscreteMeasure deposit(const WeightedPoints& pts, int grid_size);

DiscreteMeasure discretize(const FoliatedMeasure& mu, int grid_size);

/// Density of T^n_* Lebesgue, prod_j 1/|det DT(T^-j x)|, sampled at cell centres.
DiscreteMeasure srb_estimate(const ToralMap& map, int steps, int grid_size);

/// Bins the points of mu into the cells of a g x g grid, placed at cell centres.
DiscreteMeasure aggregate(const DiscreteMeasure& mu, int grid_size);

struct LeafRegularity {
  double beta = 1.0;
  double lambda_prime = 0.0;
  double H = 0.0;
  double K0 = 0.0;
  /// least n with h^n(2 K0) <= K0 for h(K) = lambda' (K + H)
  int n0 = 1;
  /// least n with 2 lambda'^n <= lambda' / (1 - lambda')
  int n0_displayed = 1;

  double h(double K) const { return lambda_prime * (K + H); }
};

/// One-step growth of measured leaf constants over a probe family, reported
/// as max(K_out / lambda' - K_in).
double estimate_leaf_distortion(const ToralMap& map, double beta);

/// K0 is floored at K_floor, since every larger K0 also works.
LeafRegularity leaf_regularity(const ToralMap& map, double beta, double K_floor = 1.0);

}  // namespace fol
