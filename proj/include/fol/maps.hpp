#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "fol/geometry.hpp"

namespace fol {

/// amplitude * sin(2*pi*k*x + phase)
struct TrigTerm1D {
  int k = 1;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// amplitude * sin(2*pi*(kx*x + ky*y) + phase)
struct TrigTerm2D {
  int kx = 0;
  int ky = 0;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// Named periodic shapes: "none", "sin2pi", "sin4pi", "cos2pi".
std::vector<TrigTerm1D> circle_shape(std::string_view id);

/// Named periodic vector fields (x-component terms, y-component terms):
/// "none", "sin2pi_y" = (sin 2 pi y, 0), "sin2pi_x" = (0, sin 2 pi x),
/// "sin2pi_xy" = (sin 2 pi y, sin 2 pi x).
std::pair<std::vector<TrigTerm2D>, std::vector<TrigTerm2D>> torus_shape(std::string_view id);

/// x -> k*x + a * shape(x) mod 1, a C^{1+alpha} expanding circle map.
class ExpandingMap1D {
 public:
  ExpandingMap1D(int degree, double amplitude, std::vector<TrigTerm1D> shape, double alpha);

  int degree() const { return degree_; }
  double amplitude() const { return amplitude_; }
  double alpha() const { return alpha_; }
  /// 1 / inf |T'| on the evaluation grid.
  double lambda() const { return lambda_; }
  /// Distortion constant H: |T'(x)| <= |T'(y)| exp(H d(x,y)^alpha).
  double distortion() const { return distortion_; }
  double min_derivative() const { return min_derivative_; }

  double lift(double x) const;
  double operator()(double x) const { return wrap01(lift(x)); }
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// Lifted preimage: the z with lift(z) == c.
  double solve_lift(double c) const;

 private:
  friend ExpandingMap1D make_expanding_map(int, double, std::string_view, double);
  double perturbation(double x) const;

  int degree_;
  double amplitude_;
  std::vector<TrigTerm1D> shape_;
  double alpha_;
  double perturbation_bound_ = 0.0;
  double lambda_ = 0.0;
  double distortion_ = 0.0;
  double min_derivative_ = 0.0;
};

inline constexpr int kExpandingEvalGrid = 4096;

ExpandingMap1D make_expanding_map(int degree, double amplitude, std::string_view shape = "sin2pi",
                                  double alpha = 1.0);

/// The k preimages of x in [0,1), in increasing lift order.
std::vector<double> inverse_branches(const ExpandingMap1D& map, double x);

/// Preimages of x and y paired branch by branch so that d(x_i, y_i) <= lambda d(x, y).
std::vector<std::pair<double, double>> paired_branches(const ExpandingMap1D& map, double x, double y);

/// Unit vector field sampled on a periodic grid, interpolated bilinearly.
/// Orientation is fixed so that every sample has positive dot with `reference`.
class DirectionField {
 public:
  DirectionField() = default;
  DirectionField(int grid_size, std::vector<Vec2> samples);
  static DirectionField constant(Vec2 direction);

  int grid_size() const { return grid_size_; }
  const std::vector<Vec2>& samples() const { return samples_; }
  Vec2 sample(int i, int j) const;
  Vec2 at(Vec2 p) const;

 private:
  int grid_size_ = 0;
  std::vector<Vec2> samples_;
};

struct ConeField {
  DirectionField centers;
  double half_angle = 0.0;
  bool strongly_preserved = false;
  /// min over grid cells of (half_angle - angle of the image cone boundary to the image center).
  double worst_margin = 0.0;

  bool contains(Vec2 p, Vec2 direction) const;
};

struct DirectionFields {
  DirectionField unstable;
  DirectionField stable;
  /// Observed per-step contraction of the angle-field iteration.
  double eta = 0.0;
  int iterations_used = 0;
};

struct ToralMapOptions {
  int cone_grid = 256;
  double cone_half_angle = 0.7853981633974483;
  double cone_margin = 1e-3;
  int field_grid = 64;
  int field_iterations = 40;
};

/// x -> A x + eps g(x) mod 1 on the 2-torus.
class ToralMap {
 public:
  ToralMap(Mat2 linear, double eps, std::vector<TrigTerm2D> gx, std::vector<TrigTerm2D> gy);

  const Mat2& linear() const { return linear_; }
  double eps() const { return eps_; }
  bool is_linear() const { return eps_ == 0.0 || (gx_.empty() && gy_.empty()); }

  double lambda_u() const { return lambda_u_; }
  double lambda_s() const { return lambda_s_; }
  Vec2 e_u() const { return e_u_; }
  Vec2 e_s() const { return e_s_; }
  /// 0.99 * grid min of |DT e_s| over the computed stable field.
  double lambda0() const { return lambda0_; }
  /// grid max of |DT e_s|; the adapted stable contraction.
  double stable_contraction() const { return stable_contraction_; }
  /// grid min of |DT e_u|.
  double unstable_expansion() const { return unstable_expansion_; }
  double eta() const { return eta_; }
  const DirectionField& unstable_field() const { return fields_.unstable; }
  const DirectionField& stable_field() const { return fields_.stable; }
  const ConeField& cones() const { return cones_; }

  Vec2 perturbation(Vec2 p) const;
  Mat2 perturbation_differential(Vec2 p) const;
  /// A p + eps g(p), without reduction mod 1.
  Vec2 lift(Vec2 p) const { return linear_ * p + eps_ * perturbation(p); }
  Vec2 operator()(Vec2 p) const { return wrap01(lift(p)); }
  Mat2 differential(Vec2 p) const;
  /// The lifted q with lift(q) == p exactly (Newton from A^{-1} p).
  Vec2 inverse_lift(Vec2 p) const;
  Vec2 inverse(Vec2 p) const { return wrap01(inverse_lift(p)); }

 private:
  friend ToralMap make_toral_map(const Mat2&, double, std::string_view, const ToralMapOptions&);

  Mat2 linear_;
  Mat2 linear_inverse_;
  double eps_;
  std::vector<TrigTerm2D> gx_, gy_;
  double lambda_u_ = 0.0, lambda_s_ = 0.0;
  Vec2 e_u_, e_s_;
  double lambda0_ = 0.0;
  double stable_contraction_ = 0.0;
  double unstable_expansion_ = 0.0;
  double eta_ = 0.0;
  DirectionFields fields_;
  ConeField cones_;
};

ToralMap make_toral_map(const Mat2& linear, double eps = 0.0, std::string_view shape = "none",
                        const ToralMapOptions& options = {});

inline Mat2 cat_matrix() { return {2.0, 1.0, 1.0, 1.0}; }

/// Unstable field by forward iteration of a generic angle field, stable by
/// backward iteration; stops once successive fields agree to 1e-10.
DirectionFields direction_fields(const ToralMap& map, int grid_size, int iterations);

/// Builds the cone field centred on `centers` and checks strong preservation on a grid.
ConeField cone_field(const ToralMap& map, const DirectionField& centers, double half_angle, int grid_size,
                     double margin);

/// max over the grid of the torus distance between T1(x) and T2(x).
double c0_distance(const ToralMap& t1, const ToralMap& t2, int grid_size);

}  // namespace fol
