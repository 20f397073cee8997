#pragma once

#include <string>
#include <vector>

#include "fol/geometry.hpp"
#include "fol/maps.hpp"

namespace fol {

/// Weighted point cloud on the circle (dim 1, y unused) or the torus (dim 2).
struct DiscreteMeasure {
  int dim = 2;
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double total() const;

  static DiscreteMeasure circle(const std::vector<double>& xs, const std::vector<double>& ws);
  static DiscreteMeasure torus(std::vector<Vec2> pts, std::vector<double> ws);
  static DiscreteMeasure dirac(Vec2 p, int dim = 2);
  /// Cell centres of a g x g (or g-point) grid with equal weights.
  static DiscreteMeasure uniform_grid(int g, int dim = 2);
};

/// Throws InvalidArgument unless weights are >= 0, sum to 1 within 1e-12 and
/// points lie in [0,1)^dim.
void validate(const DiscreteMeasure& mu);

/// Rescales weights to sum 1 and wraps points into the fundamental domain.
DiscreteMeasure normalized(DiscreteMeasure mu);

enum class CostKind { TorusDistance, TorusDistancePower, StableRestricted };

struct CostSpec {
  CostKind kind = CostKind::TorusDistance;
  double beta = 1.0;
  /// stable-restricted only
  DirectionField stable_field;
  double tube_width = 0.0;
  /// <= 0 selects the default 4 diam^beta
  double penalty = 0.0;

  static CostSpec distance() { return {}; }
  static CostSpec distance_power(double beta);
  static CostSpec stable(DirectionField field, double beta, double tube_width, double penalty = 0.0);
};

/// sqrt(2)/2 on the torus, 1/2 on the circle.
double diameter(int dim);
double default_penalty(int dim, double beta);

struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double max() const;
};

/// The stable-restricted ground cost between two points.
double stable_cost(Vec2 x, Vec2 y, Vec2 stable_dir, double beta, double tube_width, double penalty);

CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostSpec& spec);

struct PlanEntry {
  int source = 0;
  int target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0.0;
  /// Kantorovich potentials, phi(i) + psi(j) <= c(i,j).
  std::vector<double> phi;
  std::vector<double> psi;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  std::string method;
  int iterations = 0;
};

inline constexpr int kExactSizeCap = 2000;

/// Network simplex on the transportation problem; strongly feasible trees,
/// block pricing scanned in fixed lexicographic order.
TransportPlan exact_plan(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostMatrix& cost);

struct SinkhornOptions {
  double regularization = 1e-3;
  double tol = 1e-4;
  int max_iterations = 200000;
  double anneal_factor = 0.5;
};

TransportPlan sinkhorn_plan(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostMatrix& cost,
                            const SinkhornOptions& options = {});

/// Exact W1 on the circle via the weighted median of F - G.
double circle_w1(const DiscreteMeasure& source, const DiscreteMeasure& target);

/// max over rows and columns of |marginal - weight|.
double marginal_violation(const TransportPlan& plan, const DiscreteMeasure& source, const DiscreteMeasure& target);

}  // namespace fol
