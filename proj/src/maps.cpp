#include "fol/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fol/error.hpp"
#include "fol/parallel.hpp"

namespace fol {

std::vector<TrigTerm1D> circle_shape(std::string_view id) {
  if (id == "none") return {};
  if (id == "sin2pi") return {{1, 1.0, 0.0}};
  if (id == "sin4pi") return {{2, 1.0, 0.0}};
  if (id == "cos2pi") return {{1, 1.0, std::numbers::pi / 2}};
  throw Error(ErrorKind::InvalidArgument, "unknown circle shape '" + std::string(id) + "'");
}

std::pair<std::vector<TrigTerm2D>, std::vector<TrigTerm2D>> torus_shape(std::string_view id) {
  if (id == "none") return {};
  if (id == "sin2pi_y") return {{{0, 1, 1.0, 0.0}}, {}};
  if (id == "sin2pi_x") return {{}, {{1, 0, 1.0, 0.0}}};
  if (id == "sin2pi_xy") return {{{0, 1, 1.0, 0.0}}, {{1, 0, 1.0, 0.0}}};
  throw Error(ErrorKind::InvalidArgument, "unknown torus shape '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Expanding circle maps

ExpandingMap1D::ExpandingMap1D(int degree, double amplitude, std::vector<TrigTerm1D> shape, double alpha)
    : degree_(degree), amplitude_(amplitude), shape_(std::move(shape)), alpha_(alpha) {
  for (const auto& t : shape_) perturbation_bound_ += std::abs(amplitude_ * t.amplitude);
}

double ExpandingMap1D::perturbation(double x) const {
  double s = 0.0;
  for (const auto& t : shape_) s += t.amplitude * std::sin(kTwoPi * t.k * x + t.phase);
  return amplitude_ * s;
}

double ExpandingMap1D::lift(double x) const { return degree_ * x + perturbation(x); }

double ExpandingMap1D::derivative(double x) const {
  double s = 0.0;
  for (const auto& t : shape_) s += t.amplitude * kTwoPi * t.k * std::cos(kTwoPi * t.k * x + t.phase);
  return degree_ + amplitude_ * s;
}

double ExpandingMap1D::second_derivative(double x) const {
  double s = 0.0;
  for (const auto& t : shape_) {
    const double w = kTwoPi * t.k;
    s -= t.amplitude * w * w * std::sin(w * x + t.phase);
  }
  return amplitude_ * s;
}

double ExpandingMap1D::solve_lift(double c) const {
  // lift(z) - k z is bounded by the perturbation amplitude, which brackets the root.
  double lo = (c - perturbation_bound_) / degree_;
  double hi = (c + perturbation_bound_) / degree_;
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = lift(z) - c;
    if (r == 0.0) break;
    if (r > 0.0) hi = z; else lo = z;
    double next = z - r / derivative(z);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-16 * std::max(1.0, std::abs(z))) { z = next; break; }
    z = next;
  }
  if (!(std::abs(lift(z) - c) <= 1e-12)) {
    throw Error(ErrorKind::BranchSolveFailure, "branch root solve did not reach 1e-12 at c = " + std::to_string(c));
  }
  return z;
}

namespace {

// max over dyadic scales 2^-3..2^-12 and 256 base points of |u(x)-u(x+s)| / s^alpha
template <typename Fn>
double dyadic_holder(Fn&& u, double alpha) {
  double best = 0.0;
  for (int j = 3; j <= 12; ++j) {
    const double s = std::ldexp(1.0, -j);
    const double scale = std::pow(s, alpha);
    for (int b = 0; b < 256; ++b) {
      const double x = b / 256.0;
      best = std::max(best, std::abs(u(x) - u(wrap01(x + s))) / scale);
    }
  }
  return best;
}

}  // namespace

ExpandingMap1D make_expanding_map(int degree, double amplitude, std::string_view shape, double alpha) {
  if (degree < 1) throw Error(ErrorKind::InvalidDegree, "degree must be at least 2, got " + std::to_string(degree));
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1]");
  ExpandingMap1D map(degree, amplitude, circle_shape(shape), alpha);

  double inf_d = std::numeric_limits<double>::infinity();
  double sup_dd = 0.0;
  for (int i = 0; i < kExpandingEvalGrid; ++i) {
    const double x = static_cast<double>(i) / kExpandingEvalGrid;
    inf_d = std::min(inf_d, map.derivative(x));
    sup_dd = std::max(sup_dd, std::abs(map.second_derivative(x)));
  }
  if (!(inf_d > 1.0)) {
    throw Error(ErrorKind::NotExpanding, "inf T' = " + std::to_string(inf_d) + " <= 1 on the evaluation grid");
  }
  if (degree < 2) throw Error(ErrorKind::InvalidDegree, "degree must be at least 2");

  map.min_derivative_ = inf_d;
  map.lambda_ = 1.0 / inf_d;
  if (alpha == 1.0) {
    map.distortion_ = sup_dd / inf_d;
  } else {
    map.distortion_ = dyadic_holder([&](double x) { return std::log(map.derivative(x)); }, alpha);
  }
  return map;
}

std::vector<double> inverse_branches(const ExpandingMap1D& map, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw Error(ErrorKind::InvalidArgument, "point must lie in [0,1)");
  std::vector<double> out;
  out.reserve(map.degree());
  for (int i = 0; i < map.degree(); ++i) out.push_back(wrap01(map.solve_lift(x + i)));
  return out;
}

std::vector<std::pair<double, double>> paired_branches(const ExpandingMap1D& map, double x, double y) {
  // Lift y next to x so that same-index branches stay lambda-close.
  const double y_lift = x + wrap_delta(y - x);
  std::vector<std::pair<double, double>> out;
  out.reserve(map.degree());
  for (int i = 0; i < map.degree(); ++i) {
    out.emplace_back(wrap01(map.solve_lift(x + i)), wrap01(map.solve_lift(y_lift + i)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direction fields and cones

DirectionField::DirectionField(int grid_size, std::vector<Vec2> samples)
    : grid_size_(grid_size), samples_(std::move(samples)) {
  if (grid_size_ < 1 || samples_.size() != static_cast<std::size_t>(grid_size_) * grid_size_) {
    throw Error(ErrorKind::InvalidArgument, "direction field size mismatch");
  }
}

DirectionField DirectionField::constant(Vec2 direction) { return DirectionField(1, {normalized(direction)}); }

Vec2 DirectionField::sample(int i, int j) const {
  const int g = grid_size_;
  i = ((i % g) + g) % g;
  j = ((j % g) + g) % g;
  return samples_[static_cast<std::size_t>(i) * g + j];
}

Vec2 DirectionField::at(Vec2 p) const {
  if (grid_size_ == 1) return samples_.front();
  const double gx = wrap01(p.x) * grid_size_;
  const double gy = wrap01(p.y) * grid_size_;
  const int i = static_cast<int>(std::floor(gx));
  const int j = static_cast<int>(std::floor(gy));
  const double fx = gx - i, fy = gy - j;
  const Vec2 v = (1 - fx) * (1 - fy) * sample(i, j) + fx * (1 - fy) * sample(i + 1, j) +
                 (1 - fx) * fy * sample(i, j + 1) + fx * fy * sample(i + 1, j + 1);
  return normalized(v);
}

bool ConeField::contains(Vec2 p, Vec2 direction) const {
  return line_angle(centers.at(p), direction) < half_angle;
}

// ---------------------------------------------------------------------------
// Toral maps

ToralMap::ToralMap(Mat2 linear, double eps, std::vector<TrigTerm2D> gx, std::vector<TrigTerm2D> gy)
    : linear_(linear), linear_inverse_(linear.inverse()), eps_(eps), gx_(std::move(gx)), gy_(std::move(gy)) {}

namespace {

double trig_value(const std::vector<TrigTerm2D>& terms, Vec2 p) {
  double s = 0.0;
  for (const auto& t : terms) s += t.amplitude * std::sin(kTwoPi * (t.kx * p.x + t.ky * p.y) + t.phase);
  return s;
}

Vec2 trig_gradient(const std::vector<TrigTerm2D>& terms, Vec2 p) {
  Vec2 g;
  for (const auto& t : terms) {
    const double c = t.amplitude * kTwoPi * std::cos(kTwoPi * (t.kx * p.x + t.ky * p.y) + t.phase);
    g.x += c * t.kx;
    g.y += c * t.ky;
  }
  return g;
}

// Eigenvector of a 2x2 matrix for a real eigenvalue, oriented with nonnegative x.
Vec2 eigenvector(const Mat2& m, double ev) {
  Vec2 v = std::abs(m.b) > std::abs(m.c) ? Vec2{m.b, ev - m.a} : Vec2{ev - m.d, m.c};
  if (norm(v) == 0.0) v = std::abs(m.a - ev) < std::abs(m.d - ev) ? Vec2{1, 0} : Vec2{0, 1};
  v = normalized(v);
  if (v.x < 0 || (v.x == 0 && v.y < 0)) v = -v;
  return v;
}

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 orient_like(Vec2 v, Vec2 ref) { return dot(v, ref) < 0 ? -v : v; }

}  // namespace

Vec2 ToralMap::perturbation(Vec2 p) const { return {trig_value(gx_, p), trig_value(gy_, p)}; }

Mat2 ToralMap::perturbation_differential(Vec2 p) const {
  const Vec2 a = trig_gradient(gx_, p);
  const Vec2 b = trig_gradient(gy_, p);
  return {a.x, a.y, b.x, b.y};
}

Mat2 ToralMap::differential(Vec2 p) const {
  if (is_linear()) return linear_;
  return linear_ + eps_ * perturbation_differential(p);
}

Vec2 ToralMap::inverse_lift(Vec2 p) const {
  Vec2 q = linear_inverse_ * p;
  if (is_linear()) return q;
  for (int it = 0; it < 60; ++it) {
    const Vec2 r = lift(q) - p;
    if (std::abs(r.x) + std::abs(r.y) <= 1e-15 * (1.0 + std::abs(p.x) + std::abs(p.y))) return q;
    q -= differential(q).inverse() * r;
  }
  const Vec2 r = lift(q) - p;
  if (std::abs(r.x) + std::abs(r.y) > 1e-11 * (1.0 + std::abs(p.x) + std::abs(p.y))) {
    throw Error(ErrorKind::NoConvergence, "toral inverse Newton solve failed");
  }
  return q;
}

DirectionFields direction_fields(const ToralMap& map, int grid_size, int iterations) {
  constexpr double kTol = 1e-10;
  constexpr int kBurnIn = 2;
  if (iterations < 1) throw Error(ErrorKind::NoConvergence, "no iterations, no contraction evidence");
  if (grid_size < 1) throw Error(ErrorKind::InvalidArgument, "grid_size must be positive");

  const std::size_t npts = static_cast<std::size_t>(grid_size) * grid_size;
  const int n = iterations;
  // angles[k][p]: field after k+1 steps at grid point p
  std::vector<std::vector<Vec2>> unstable(n, std::vector<Vec2>(npts));
  std::vector<std::vector<Vec2>> stable(n, std::vector<Vec2>(npts));
  const Vec2 seed_u = rotate(map.e_u(), 0.5);
  const Vec2 seed_s = rotate(map.e_s(), 0.5);

  parallel_for(npts, [&](std::size_t idx) {
    const Vec2 p{static_cast<double>(idx / grid_size) / grid_size, static_cast<double>(idx % grid_size) / grid_size};
    std::vector<Vec2> back(n + 1), fwd(n + 1);
    back[0] = p;
    fwd[0] = p;
    for (int k = 1; k <= n; ++k) {
      back[k] = map.inverse(back[k - 1]);
      fwd[k] = map(fwd[k - 1]);
    }
    for (int k = 1; k <= n; ++k) {
      Vec2 v = seed_u;
      for (int j = k; j >= 1; --j) v = normalized(map.differential(back[j]) * v);
      unstable[k - 1][idx] = orient_like(v, map.e_u());
      Vec2 w = seed_s;
      for (int j = k - 1; j >= 0; --j) w = normalized(map.differential(fwd[j]).inverse() * w);
      stable[k - 1][idx] = orient_like(w, map.e_s());
    }
  }, 16);

  auto step_distance = [&](const std::vector<std::vector<Vec2>>& f, int k, Vec2 seed) {
    double d = 0.0;
    for (std::size_t i = 0; i < npts; ++i) d = std::max(d, line_angle(f[k][i], k == 0 ? seed : f[k - 1][i]));
    return d;
  };

  DirectionFields out;
  int converged = -1;
  double eta = 0.0;
  std::vector<double> du(n), ds(n);
  for (int k = 0; k < n; ++k) {
    du[k] = step_distance(unstable, k, seed_u);
    ds[k] = step_distance(stable, k, seed_s);
    const double d = std::max(du[k], ds[k]);
    if (k >= kBurnIn) {
      for (const auto* seq : {&du, &ds}) {
        const double prev = (*seq)[k - 1];
        const double cur = (*seq)[k];
        if (prev > 0.0) {
          const double ratio = cur / prev;
          if (ratio >= 1.0 && d > kTol) {
            throw Error(ErrorKind::NoConvergence, "angle-field iteration stopped contracting at step " +
                                                      std::to_string(k + 1));
          }
          if (cur > 1e-13) eta = std::max(eta, ratio);
        }
      }
    }
    if (d <= kTol) {
      converged = k;
      break;
    }
  }
  if (converged < 0) {
    throw Error(ErrorKind::NoConvergence, "angle fields did not reach 1e-10 within " + std::to_string(n) + " steps");
  }
  out.unstable = DirectionField(grid_size, unstable[converged]);
  out.stable = DirectionField(grid_size, stable[converged]);
  out.eta = eta;
  out.iterations_used = converged + 1;
  return out;
}

ConeField cone_field(const ToralMap& map, const DirectionField& centers, double half_angle, int grid_size,
                     double margin) {
  ConeField cones;
  cones.centers = centers;
  cones.half_angle = half_angle;
  const std::size_t npts = static_cast<std::size_t>(grid_size) * grid_size;
  std::vector<double> margins(npts);
  std::vector<double> dets(npts);
  parallel_for(npts, [&](std::size_t idx) {
    const Vec2 p{static_cast<double>(idx / grid_size) / grid_size, static_cast<double>(idx % grid_size) / grid_size};
    const Mat2 dt = map.differential(p);
    dets[idx] = dt.det();
    const Vec2 c = centers.at(p);
    const Vec2 target = centers.at(map(p));
    double worst = 0.0;
    for (const double a : {-half_angle, 0.0, half_angle}) {
      worst = std::max(worst, line_angle(dt * rotate(c, a), target));
    }
    margins[idx] = half_angle - worst;
  });
  double worst_margin = std::numeric_limits<double>::infinity();
  bool same_sign = true;
  for (std::size_t i = 0; i < npts; ++i) {
    worst_margin = std::min(worst_margin, margins[i]);
    if ((dets[i] > 0) != (dets[0] > 0) || dets[i] == 0.0) same_sign = false;
  }
  cones.worst_margin = worst_margin;
  cones.strongly_preserved = same_sign && worst_margin > margin;
  return cones;
}

ToralMap make_toral_map(const Mat2& linear, double eps, std::string_view shape, const ToralMapOptions& options) {
  if (std::abs(std::abs(linear.det()) - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "linear part must have |det| = 1");
  }
  for (double e : {linear.a, linear.b, linear.c, linear.d}) {
    if (e != std::round(e)) throw Error(ErrorKind::InvalidArgument, "linear part must be an integer matrix");
  }
  if (std::abs(linear.trace()) <= 2.0) {
    throw Error(ErrorKind::NotHyperbolic, "|trace A| <= 2");
  }
  if (eps < 0.0) throw Error(ErrorKind::InvalidArgument, "perturbation size must be >= 0");
  auto [gx, gy] = torus_shape(shape);
  ToralMap map(linear, eps, std::move(gx), std::move(gy));

  const double tr = linear.trace();
  const double disc = std::sqrt(tr * tr - 4.0 * linear.det());
  const double ev1 = 0.5 * (tr + disc), ev2 = 0.5 * (tr - disc);
  const double ev_u = std::abs(ev1) > std::abs(ev2) ? ev1 : ev2;
  const double ev_s = std::abs(ev1) > std::abs(ev2) ? ev2 : ev1;
  map.lambda_u_ = std::abs(ev_u);
  map.lambda_s_ = std::abs(ev_s);
  map.e_u_ = eigenvector(linear, ev_u);
  map.e_s_ = eigenvector(linear, ev_s);

  map.cones_ = cone_field(map, DirectionField::constant(map.e_u_), options.cone_half_angle, options.cone_grid,
                          options.cone_margin);
  if (!map.cones_.strongly_preserved) {
    throw Error(ErrorKind::ConeViolation, "perturbation breaks strong cone preservation (worst margin " +
                                              std::to_string(map.cones_.worst_margin) + ")");
  }

  map.fields_ = direction_fields(map, options.field_grid, options.field_iterations);
  map.eta_ = map.fields_.eta;

  double min_s = std::numeric_limits<double>::infinity(), max_s = 0.0;
  double min_u = std::numeric_limits<double>::infinity();
  const int g = options.field_grid;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Vec2 p{static_cast<double>(i) / g, static_cast<double>(j) / g};
      const Mat2 dt = map.differential(p);
      const double s = norm(dt * map.fields_.stable.sample(i, j));
      min_s = std::min(min_s, s);
      max_s = std::max(max_s, s);
      min_u = std::min(min_u, norm(dt * map.fields_.unstable.sample(i, j)));
    }
  }
  map.lambda0_ = 0.99 * min_s;
  map.stable_contraction_ = max_s;
  map.unstable_expansion_ = min_u;
  return map;
}

double c0_distance(const ToralMap& t1, const ToralMap& t2, int grid_size) {
  double best = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    for (int j = 0; j < grid_size; ++j) {
      const Vec2 p{static_cast<double>(i) / grid_size, static_cast<double>(j) / grid_size};
      best = std::max(best, torus_distance(t1(p), t2(p)));
    }
  }
  return best;
}

}  // namespace fol
