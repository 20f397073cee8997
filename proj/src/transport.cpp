#include "fol/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "fol/error.hpp"
#include "fol/parallel.hpp"

namespace fol {

namespace {

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

double DiscreteMeasure::total() const { return kahan_sum(weights); }

DiscreteMeasure DiscreteMeasure::circle(const std::vector<double>& xs, const std::vector<double>& ws) {
  DiscreteMeasure mu;
  mu.dim = 1;
  for (double x : xs) mu.points.push_back({x, 0.0});
  mu.weights = ws;
  return mu;
}

DiscreteMeasure DiscreteMeasure::torus(std::vector<Vec2> pts, std::vector<double> ws) {
  DiscreteMeasure mu;
  mu.dim = 2;
  mu.points = std::move(pts);
  mu.weights = std::move(ws);
  return mu;
}

DiscreteMeasure DiscreteMeasure::dirac(Vec2 p, int dim) {
  DiscreteMeasure mu;
  mu.dim = dim;
  mu.points = {p};
  mu.weights = {1.0};
  return mu;
}

DiscreteMeasure DiscreteMeasure::uniform_grid(int g, int dim) {
  DiscreteMeasure mu;
  mu.dim = dim;
  if (dim == 1) {
    for (int i = 0; i < g; ++i) mu.points.push_back({(i + 0.5) / g, 0.0});
  } else {
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) mu.points.push_back({(i + 0.5) / g, (j + 0.5) / g});
  }
  mu.weights.assign(mu.points.size(), 1.0 / static_cast<double>(mu.points.size()));
  return mu;
}

void validate(const DiscreteMeasure& mu) {
  if (mu.dim != 1 && mu.dim != 2) throw Error(ErrorKind::InvalidArgument, "dimension must be 1 or 2");
  if (mu.points.empty() || mu.points.size() != mu.weights.size()) {
    throw Error(ErrorKind::InvalidArgument, "measure needs matching nonempty points and weights");
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu.weights[i] >= 0.0)) throw Error(ErrorKind::NegativeWeight, "weight " + std::to_string(i) + " < 0");
    const Vec2 p = mu.points[i];
    const bool inside = p.x >= 0.0 && p.x < 1.0 && (mu.dim == 1 || (p.y >= 0.0 && p.y < 1.0));
    if (!inside) throw Error(ErrorKind::InvalidArgument, "point " + std::to_string(i) + " outside [0,1)");
  }
  if (std::abs(mu.total() - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "weights do not sum to 1");
}

DiscreteMeasure normalized(DiscreteMeasure mu) {
  const double t = mu.total();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "measure has no mass");
  for (double& w : mu.weights) w /= t;
  for (Vec2& p : mu.points) p = mu.dim == 1 ? Vec2{wrap01(p.x), 0.0} : wrap01(p);
  return mu;
}

CostSpec CostSpec::distance_power(double beta) {
  CostSpec s;
  s.kind = CostKind::TorusDistancePower;
  s.beta = beta;
  return s;
}

CostSpec CostSpec::stable(DirectionField field, double beta, double tube_width, double penalty) {
  CostSpec s;
  s.kind = CostKind::StableRestricted;
  s.beta = beta;
  s.stable_field = std::move(field);
  s.tube_width = tube_width;
  s.penalty = penalty;
  return s;
}

double diameter(int dim) { return dim == 1 ? 0.5 : std::sqrt(0.5); }

double default_penalty(int dim, double beta) { return 4.0 * std::pow(diameter(dim), beta); }

double CostMatrix::max() const {
  double m = 0.0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

double stable_cost(Vec2 x, Vec2 y, Vec2 stable_dir, double beta, double tube_width, double penalty) {
  const Vec2 e = normalized(stable_dir);
  const Vec2 d0 = wrap_delta(y - x);
  double best = std::numeric_limits<double>::infinity();
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      const Vec2 d{d0.x + a, d0.y + b};
      const double t = std::abs(dot(d, e));
      const double p = std::abs(cross(e, d));
      if (p <= tube_width && t <= 0.5) best = std::min(best, t);
    }
  }
  return std::isfinite(best) ? std::pow(best, beta) : penalty;
}

CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostSpec& spec) {
  if (source.points.empty() || target.points.empty()) throw Error(ErrorKind::InvalidArgument, "empty measure");
  if (source.dim != target.dim) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (!(spec.beta > 0.0 && spec.beta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0,1]");
  const int dim = source.dim;
  double penalty = spec.penalty;
  if (spec.kind == CostKind::StableRestricted) {
    if (dim != 2) throw Error(ErrorKind::InvalidArgument, "stable-restricted cost needs torus measures");
    if (spec.stable_field.grid_size() == 0) throw Error(ErrorKind::InvalidArgument, "stable field missing");
    if (!(spec.tube_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "tube width must be positive");
    if (penalty <= 0.0) penalty = default_penalty(dim, spec.beta);
    if (!(penalty > std::pow(diameter(dim), spec.beta))) {
      throw Error(ErrorKind::InvalidArgument, "penalty must exceed diam^beta");
    }
  }
  CostMatrix c;
  c.rows = static_cast<int>(source.size());
  c.cols = static_cast<int>(target.size());
  c.data.resize(static_cast<std::size_t>(c.rows) * c.cols);
  parallel_for(source.size(), [&](std::size_t i) {
    const Vec2 x = source.points[i];
    const Vec2 e = spec.kind == CostKind::StableRestricted ? spec.stable_field.at(x) : Vec2{};
    for (int j = 0; j < c.cols; ++j) {
      const Vec2 y = target.points[j];
      double v;
      switch (spec.kind) {
        case CostKind::TorusDistance:
          v = dim == 1 ? circle_distance(x.x, y.x) : torus_distance(x, y);
          break;
        case CostKind::TorusDistancePower:
          v = std::pow(dim == 1 ? circle_distance(x.x, y.x) : torus_distance(x, y), spec.beta);
          break;
        default:
          v = stable_cost(x, y, e, spec.beta, spec.tube_width, penalty);
      }
      c(static_cast<int>(i), j) = v;
    }
  }, 8);
  return c;
}

// ---------------------------------------------------------------------------
// Network simplex

namespace {

class NetworkSimplex {
 public:
  NetworkSimplex(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& c)
      : n_(static_cast<int>(a.size())), m_(static_cast<int>(b.size())), a_(a), b_(b), c_(c) {
    root_ = n_ + m_;
    const int nodes = n_ + m_ + 1;
    parent_.assign(nodes, -1);
    arc_.assign(nodes, -1);
    up_.assign(nodes, false);
    flow_.assign(nodes, 0.0);
    depth_.assign(nodes, 0);
    pi_.assign(nodes, 0.0);
    children_.assign(nodes, {});
    max_cost_ = c.max();
    big_m_ = 2.0 * (max_cost_ + 1.0);
    eps_ = 1e-11 * std::max(1.0, max_cost_);
    real_arcs_ = static_cast<long long>(n_) * m_;
    block_ = std::max<long long>(10, static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(real_arcs_)))));

    // star tree: supplies drain into the root, the root feeds the demands
    for (int v = 0; v < n_ + m_; ++v) {
      parent_[v] = root_;
      arc_[v] = real_arcs_ + v;
      depth_[v] = 1;
      children_[root_].push_back(v);
      if (v < n_) {
        up_[v] = a_[v] > 0.0;
        flow_[v] = a_[v];
      } else {
        up_[v] = false;
        flow_[v] = b_[v - n_];
      }
      pi_[v] = up_[v] ? -big_m_ : big_m_;
    }
  }

  int run() {
    int pivots = 0;
    long long entering;
    while ((entering = find_entering()) >= 0) {
      pivot(entering);
      ++pivots;
    }
    return pivots;
  }

  double reduced(long long e) const {
    const int i = static_cast<int>(e / m_);
    const int j = static_cast<int>(e % m_);
    return c_(i, j) + pi_[i] - pi_[n_ + j];
  }

  TransportPlan extract() const {
    TransportPlan plan;
    plan.method = "exact";
    for (int v = 0; v < n_ + m_; ++v) {
      if (arc_[v] >= real_arcs_) {
        if (flow_[v] > 1e-9) throw Error(ErrorKind::Infeasible, "marginals do not balance");
        continue;
      }
      if (flow_[v] <= 0.0) continue;
      const int i = static_cast<int>(arc_[v] / m_);
      const int j = static_cast<int>(arc_[v] % m_);
      plan.entries.push_back({i, j, flow_[v]});
    }
    std::sort(plan.entries.begin(), plan.entries.end(),
              [](const PlanEntry& x, const PlanEntry& y) { return std::tie(x.source, x.target) < std::tie(y.source, y.target); });
    std::vector<double> terms;
    for (const auto& e : plan.entries) terms.push_back(e.mass * c_(e.source, e.target));
    plan.cost = kahan_sum(terms);

    plan.phi.resize(n_);
    plan.psi.resize(m_);
    const double shift = -pi_[0];
    for (int i = 0; i < n_; ++i) plan.phi[i] = -pi_[i] - shift;
    for (int j = 0; j < m_; ++j) plan.psi[j] = pi_[n_ + j] + shift;
    terms.clear();
    for (int i = 0; i < n_; ++i) terms.push_back(a_[i] * plan.phi[i]);
    for (int j = 0; j < m_; ++j) terms.push_back(b_[j] * plan.psi[j]);
    plan.dual_objective = kahan_sum(terms);
    plan.duality_gap = plan.cost - plan.dual_objective;
    return plan;
  }

 private:
  long long find_entering() {
    double best = -eps_;
    long long best_arc = -1;
    long long count = 0;
    for (long long scanned = 0; scanned < real_arcs_; ++scanned) {
      const long long e = (next_ + scanned) % real_arcs_;
      const double r = reduced(e);
      if (r < best) {
        best = r;
        best_arc = e;
      }
      if (++count == block_) {
        if (best_arc >= 0) {
          next_ = (e + 1) % real_arcs_;
          return best_arc;
        }
        count = 0;
      }
    }
    return best_arc;
  }

  double arc_cost(long long id) const {
    if (id >= real_arcs_) return big_m_;
    return c_(static_cast<int>(id / m_), static_cast<int>(id % m_));
  }

  void pivot(long long entering) {
    const int k = static_cast<int>(entering / m_);
    const int l = n_ + static_cast<int>(entering % m_);

    // paths up to the apex, as child nodes whose tree arc lies on the cycle
    std::vector<int> path_k, path_l;
    int x = k, y = l;
    while (x != y) {
      if (depth_[x] >= depth_[y]) {
        path_k.push_back(x);
        x = parent_[x];
      } else {
        path_l.push_back(y);
        y = parent_[y];
      }
    }

    // Cycle oriented along k -> l; scan from the apex down to k, then from l
    // up to the apex, keeping the last blocking arc (strongly feasible rule).
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    bool leave_on_k = false;
    for (auto it = path_k.rbegin(); it != path_k.rend(); ++it) {
      if (up_[*it] && flow_[*it] <= theta) {
        theta = flow_[*it];
        leave = *it;
        leave_on_k = true;
      }
    }
    for (int c : path_l) {
      if (!up_[c] && flow_[c] <= theta) {
        theta = flow_[c];
        leave = c;
        leave_on_k = false;
      }
    }
    if (leave < 0) throw Error(ErrorKind::Infeasible, "unbounded transportation cycle");

    for (int c : path_k) flow_[c] += up_[c] ? -theta : theta;
    for (int c : path_l) flow_[c] += up_[c] ? theta : -theta;

    const int u_in = leave_on_k ? k : l;
    const int v_in = leave_on_k ? l : k;

    // re-root the detached subtree at u_in
    std::vector<int> chain;
    for (int v = u_in; v != leave; v = parent_[v]) chain.push_back(v);
    chain.push_back(leave);
    detach(leave, parent_[leave]);
    for (std::size_t t = chain.size() - 1; t >= 1; --t) {
      const int child = chain[t - 1];
      const int node = chain[t];
      detach(child, node);
      parent_[node] = child;
      arc_[node] = arc_[child];
      up_[node] = !up_[child];
      flow_[node] = flow_[child];
      children_[child].push_back(node);
    }
    parent_[u_in] = v_in;
    arc_[u_in] = entering;
    up_[u_in] = leave_on_k;
    flow_[u_in] = theta;
    children_[v_in].push_back(u_in);

    std::vector<int> stack{u_in};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      const int p = parent_[v];
      depth_[v] = depth_[p] + 1;
      const double cost = arc_cost(arc_[v]);
      pi_[v] = up_[v] ? pi_[p] - cost : pi_[p] + cost;
      for (int c : children_[v]) stack.push_back(c);
    }
  }

  void detach(int child, int parent) {
    auto& ch = children_[parent];
    ch.erase(std::find(ch.begin(), ch.end(), child));
  }

  int n_, m_, root_;
  const std::vector<double>& a_;
  const std::vector<double>& b_;
  const CostMatrix& c_;
  std::vector<int> parent_;
  std::vector<long long> arc_;
  std::vector<bool> up_;
  std::vector<double> flow_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<std::vector<int>> children_;
  double max_cost_ = 0.0, big_m_ = 0.0, eps_ = 0.0;
  long long real_arcs_ = 0, block_ = 0, next_ = 0;
};

void check_plan_inputs(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostMatrix& cost) {
  if (source.points.empty() || target.points.empty()) throw Error(ErrorKind::InvalidArgument, "empty measure");
  if (cost.rows != static_cast<int>(source.size()) || cost.cols != static_cast<int>(target.size())) {
    throw Error(ErrorKind::InvalidArgument, "cost table does not match the measures");
  }
  for (double w : source.weights)
    if (!(w >= 0.0)) throw Error(ErrorKind::NegativeWeight, "negative source weight");
  for (double w : target.weights)
    if (!(w >= 0.0)) throw Error(ErrorKind::NegativeWeight, "negative target weight");
}

}  // namespace

TransportPlan exact_plan(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostMatrix& cost) {
  check_plan_inputs(source, target, cost);
  if (source.size() > kExactSizeCap || target.size() > kExactSizeCap) {
    throw Error(ErrorKind::ScaleExceeded, "exact solver is capped at " + std::to_string(kExactSizeCap) + " points");
  }
  const std::vector<double>& a = source.weights;
  std::vector<double> b = target.weights;
  const double ta = source.total(), tb = target.total();
  if (!(tb > 0.0)) throw Error(ErrorKind::Infeasible, "target has no mass");
  if (std::abs(ta - tb) > 1e-9 * std::max(1.0, ta)) throw Error(ErrorKind::Infeasible, "unequal total masses");
  for (double& w : b) w *= ta / tb;

  NetworkSimplex ns(a, b, cost);
  const int pivots = ns.run();
  TransportPlan plan = ns.extract();
  plan.iterations = pivots;
  return plan;
}

// ---------------------------------------------------------------------------
// Sinkhorn

TransportPlan sinkhorn_plan(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostMatrix& cost,
                            const SinkhornOptions& options) {
  check_plan_inputs(source, target, cost);
  if (!(options.regularization > 0.0)) throw Error(ErrorKind::InvalidArgument, "regularization must be positive");
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");

  std::vector<int> rows, cols;
  for (int i = 0; i < cost.rows; ++i)
    if (source.weights[i] > 0.0) rows.push_back(i);
  for (int j = 0; j < cost.cols; ++j)
    if (target.weights[j] > 0.0) cols.push_back(j);
  const int n = static_cast<int>(rows.size()), m = static_cast<int>(cols.size());
  std::vector<double> a(n), b(m), la(n), lb(m), f(n, 0.0), g(m, 0.0);
  for (int i = 0; i < n; ++i) la[i] = std::log(a[i] = source.weights[rows[i]]);
  for (int j = 0; j < m; ++j) lb[j] = std::log(b[j] = target.weights[cols[j]]);
  std::vector<double> c(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) c[static_cast<std::size_t>(i) * m + j] = cost(rows[i], cols[j]);

  // keep small instances on one thread; spawning dominates below ~64k cells
  const std::size_t chunk_f = std::max<std::size_t>(16, 65536 / std::max(m, 1));
  const std::size_t chunk_g = std::max<std::size_t>(16, 65536 / std::max(n, 1));
  auto update_f = [&](double eps) {
    parallel_for(n, [&](std::size_t i) {
      const double* ci = &c[i * m];
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) mx = std::max(mx, lb[j] + (g[j] - ci[j]) / eps);
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += std::exp(lb[j] + (g[j] - ci[j]) / eps - mx);
      f[i] = -eps * (mx + std::log(s));
    }, chunk_f);
  };
  auto update_g = [&](double eps) {
    parallel_for(m, [&](std::size_t j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) mx = std::max(mx, la[i] + (f[i] - c[i * m + j]) / eps);
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::exp(la[i] + (f[i] - c[i * m + j]) / eps - mx);
      g[j] = -eps * (mx + std::log(s));
    }, chunk_g);
  };
  // after a g update the columns are exact; measure the row error
  auto row_violation = [&](double eps) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = 0.0;
      for (int j = 0; j < m; ++j) r += std::exp(la[i] + lb[j] + (f[i] + g[j] - c[i * m + j]) / eps);
      v += std::abs(r - a[i]);
    }
    return v;
  };

  const double target_eps = options.regularization;
  double eps = std::max(target_eps, *std::max_element(c.begin(), c.end()));
  int iterations = 0;
  for (;;) {
    const bool last = eps <= target_eps;
    const double stage_tol = last ? options.tol : std::max(options.tol, 1e-4);
    for (int it = 0;; ++it) {
      update_f(eps);
      update_g(eps);
      ++iterations;
      if (iterations > options.max_iterations) {
        throw Error(ErrorKind::NoConvergence, "Sinkhorn iteration budget exhausted");
      }
      if (it % 10 == 9 || n == 1 || m == 1) {
        if (row_violation(eps) <= stage_tol) break;
        if (!last && it >= 2000) break;
      }
    }
    if (last) break;
    eps = std::max(target_eps, eps * options.anneal_factor);
  }

  // round onto the exact transport polytope
  std::vector<double> p(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      p[i * m + j] = std::exp(la[i] + lb[j] + (f[i] + g[j] - c[i * m + j]) / eps);
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int j = 0; j < m; ++j) r += p[i * m + j];
    const double s = r > a[i] ? a[i] / r : 1.0;
    for (int j = 0; j < m; ++j) p[i * m + j] *= s;
  }
  for (int j = 0; j < m; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += p[i * m + j];
    const double s = col > b[j] ? b[j] / col : 1.0;
    for (int i = 0; i < n; ++i) p[i * m + j] *= s;
  }
  std::vector<double> er(n), ec(m);
  double er_total = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int j = 0; j < m; ++j) r += p[i * m + j];
    er[i] = std::max(0.0, a[i] - r);
    er_total += er[i];
  }
  for (int j = 0; j < m; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += p[i * m + j];
    ec[j] = std::max(0.0, b[j] - col);
  }
  if (er_total > 0.0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) p[i * m + j] += er[i] * ec[j] / er_total;
  }

  TransportPlan plan;
  plan.method = "sinkhorn";
  plan.iterations = iterations;
  std::vector<double> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double mass = p[i * m + j];
      if (mass <= 0.0) continue;
      plan.entries.push_back({rows[i], cols[j], mass});
      terms.push_back(mass * c[i * m + j]);
    }
  }
  plan.cost = kahan_sum(terms);
  plan.phi.assign(cost.rows, 0.0);
  plan.psi.assign(cost.cols, 0.0);
  terms.clear();
  for (int i = 0; i < n; ++i) {
    plan.phi[rows[i]] = f[i];
    terms.push_back(a[i] * f[i]);
  }
  for (int j = 0; j < m; ++j) {
    plan.psi[cols[j]] = g[j];
    terms.push_back(b[j] * g[j]);
  }
  plan.dual_objective = kahan_sum(terms);
  plan.duality_gap = plan.cost - plan.dual_objective;
  return plan;
}

// ---------------------------------------------------------------------------

double circle_w1(const DiscreteMeasure& source, const DiscreteMeasure& target) {
  if (source.dim != 1 || target.dim != 1) throw Error(ErrorKind::InvalidArgument, "circle_w1 needs 1D measures");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(source.size() + target.size());
  for (std::size_t i = 0; i < source.size(); ++i) pts.emplace_back(wrap01(source.points[i].x), source.weights[i]);
  for (std::size_t j = 0; j < target.size(); ++j) pts.emplace_back(wrap01(target.points[j].x), -target.weights[j]);
  std::sort(pts.begin(), pts.end());

  // D = F - G is constant between consecutive support points; the wrap
  // interval [last, 1) + [0, first) carries D = total imbalance ~ 0.
  std::vector<std::pair<double, double>> pieces;  // (value, length)
  double d = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    d += pts[k].second;
    const double next = k + 1 < pts.size() ? pts[k + 1].first : pts.front().first + 1.0;
    const double len = next - pts[k].first;
    if (len > 0.0) pieces.emplace_back(d, len);
  }
  if (pieces.empty()) return 0.0;
  std::vector<std::pair<double, double>> sorted = pieces;
  std::sort(sorted.begin(), sorted.end());
  double half = 0.0;
  for (const auto& p : sorted) half += p.second;
  half *= 0.5;
  double acc = 0.0, t = sorted.back().first;
  for (const auto& p : sorted) {
    acc += p.second;
    if (acc >= half) {
      t = p.first;
      break;
    }
  }
  std::vector<double> terms;
  for (const auto& p : pieces) terms.push_back(p.second * std::abs(p.first - t));
  return kahan_sum(terms);
}

double marginal_violation(const TransportPlan& plan, const DiscreteMeasure& source, const DiscreteMeasure& target) {
  std::vector<double> r(source.size(), 0.0), c(target.size(), 0.0);
  for (const auto& e : plan.entries) {
    r[e.source] += e.mass;
    c[e.target] += e.mass;
  }
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) v = std::max(v, std::abs(r[i] - source.weights[i]));
  for (std::size_t j = 0; j < c.size(); ++j) v = std::max(v, std::abs(c[j] - target.weights[j]));
  return v;
}

}  // namespace fol
