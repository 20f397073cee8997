#include "fol/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fol/error.hpp"
#include "fol/parallel.hpp"

namespace fol {

namespace {

struct Crossing {
  std::size_t seg = 0;
  /// arclength of the crossing on the leaf
  double s = 0.0;
  /// coordinate along the transversal
  double t = 0.0;
  /// crossing point relative to the transversal's centre
  Vec2 x;
  double rho = 0.0;
  /// trapezoid integral of the sampled unit tent
  double unit_mass = 0.0;
  double capacity = 0.0;
};

double tent(double s, double centre, double r) { return std::max(0.0, 1.0 - std::abs(s - centre) / r); }

std::pair<std::size_t, std::size_t> tent_range(const LeafSegment& seg, double centre, double r) {
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor((centre - r) / seg.ds)));
  const auto hi = std::min(seg.points.size() - 1, static_cast<std::size_t>(std::ceil((centre + r) / seg.ds)));
  return {lo, hi};
}

double trapezoid_weight(const LeafSegment& seg, std::size_t i) {
  return (i == 0 || i + 1 == seg.points.size()) ? 0.5 * seg.ds : seg.ds;
}

double unit_tent_mass(const LeafSegment& seg, double centre, double r) {
  const auto [lo, hi] = tent_range(seg, centre, r);
  double m = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) m += tent(seg.ds * static_cast<double>(i), centre, r) * trapezoid_weight(seg, i);
  return m;
}

/// Point at arclength s, relative to the crossing point at arclength s0 placed at x0.
Vec2 leaf_point(const LeafSegment& seg, double s, double s0, Vec2 x0) {
  const auto at = [&](double u) {
    const double f = std::clamp(u / seg.ds, 0.0, static_cast<double>(seg.points.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(f), seg.points.size() - 2);
    const double w = f - static_cast<double>(i);
    return seg.points[i] + w * (seg.points[i + 1] - seg.points[i]);
  };
  return x0 + (at(s) - at(s0));
}

std::vector<Crossing> find_crossings(const FoliatedMeasure& mu, Vec2 c, Vec2 e, double half_length, double r,
                                     double kappa) {
  std::vector<std::vector<Crossing>> per(mu.segments.size());
  parallel_for(
      per.size(),
      [&](std::size_t si) {
        const auto& seg = mu.segments[si];
        const double len = seg.length();
        for (std::size_t k = 0; k + 1 < seg.points.size(); ++k) {
          const Vec2 a = wrap_delta(seg.points[k] - c);
          const Vec2 b = a + (seg.points[k + 1] - seg.points[k]);
          const double fa = cross(e, a), fb = cross(e, b);
          if ((fa < 0.0) == (fb < 0.0)) continue;
          const double u = fa / (fa - fb);
          const Vec2 x = a + u * (b - a);
          const double t = dot(e, x);
          const double s = (static_cast<double>(k) + u) * seg.ds;
          if (std::abs(t) > half_length || s < r || s > len - r) continue;
          if (!per[si].empty() && s - per[si].back().s < 2 * r) continue;
          Crossing cr;
          cr.seg = si;
          cr.s = s;
          cr.t = t;
          cr.x = x;
          cr.rho = seg.density[k] + u * (seg.density[k + 1] - seg.density[k]);
          cr.unit_mass = unit_tent_mass(seg, s, r);
          cr.capacity = kappa * seg.weight * cr.rho * cr.unit_mass;
          per[si].push_back(cr);
        }
      },
      16);
  std::vector<Crossing> out;
  for (auto& v : per)
    for (auto& cr : v) out.push_back(cr);
  std::stable_sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
  return out;
}

int best_block(const FoliatedMeasure& mu1, const FoliatedMeasure& mu2, int blocks, double& overlap) {
  const auto binned = [&](const FoliatedMeasure& mu) {
    std::vector<double> m(static_cast<std::size_t>(blocks * blocks), 0.0);
    const auto q = quadrature_points(mu);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const int bx = std::min(blocks - 1, static_cast<int>(q.points[i].x * blocks));
      const int by = std::min(blocks - 1, static_cast<int>(q.points[i].y * blocks));
      m[static_cast<std::size_t>(bx * blocks + by)] += q.masses[i];
    }
    return m;
  };
  const auto m1 = binned(mu1), m2 = binned(mu2);
  int best = 0;
  overlap = -1.0;
  for (std::size_t b = 0; b < m1.size(); ++b) {
    const double o = std::min(m1[b], m2[b]);
    if (o > overlap) {
      overlap = o;
      best = static_cast<int>(b);
    }
  }
  return best;
}

/// Removes h * tent from the leaf density in absolute terms and appends the
/// removed nodes to `slice`.
void remove_tent(LeafSegment& seg, std::vector<double>& absolute, double centre, double r, double h,
                 WeightedPoints& slice) {
  const auto [lo, hi] = tent_range(seg, centre, r);
  for (std::size_t i = lo; i <= hi; ++i) {
    const double f = h * tent(seg.ds * static_cast<double>(i), centre, r);
    if (f <= 0.0) continue;
    absolute[i] -= f;
    slice.points.push_back(wrap01(seg.points[i]));
    slice.masses.push_back(f * trapezoid_weight(seg, i));
  }
}

FoliatedMeasure residual_of(const FoliatedMeasure& mu, const std::vector<Crossing>& crossings,
                            const std::vector<double>& heights, double r, WeightedPoints& slice) {
  FoliatedMeasure out = mu;
  std::vector<std::vector<double>> absolute(out.segments.size());
  for (std::size_t a = 0; a < crossings.size(); ++a) {
    if (heights[a] <= 0.0) continue;
    auto& seg = out.segments[crossings[a].seg];
    auto& abs = absolute[crossings[a].seg];
    if (abs.empty()) {
      abs = seg.density;
      for (auto& v : abs) v *= seg.weight;
    }
    remove_tent(seg, abs, crossings[a].s, r, heights[a], slice);
  }
  for (std::size_t si = 0; si < out.segments.size(); ++si) {
    if (absolute[si].empty()) continue;
    auto& seg = out.segments[si];
    for (double v : absolute[si])
      if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "tent exceeded the leaf density");
    seg.weight = leaf_integral(absolute[si], seg.ds);
    seg.density = absolute[si];
    for (auto& v : seg.density) v /= seg.weight;
  }
  const double total = out.total_mass();
  for (auto& seg : out.segments) seg.weight /= total;
  return out;
}

Vec2 pull_back(const ToralMap& map, Vec2 p, int steps) {
  for (int i = 0; i < steps; ++i) p = map.inverse(p);
  return p;
}

/// Length of T^-steps of the straight path from p to p + v.
double pulled_back_length(const ToralMap& map, Vec2 p, Vec2 v, int steps) {
  if (steps == 0 || norm(v) == 0.0) return norm(v);
  const int pieces = 16;
  std::vector<Vec2> q(pieces + 1);
  for (int i = 0; i <= pieces; ++i) {
    q[static_cast<std::size_t>(i)] = p + (static_cast<double>(i) / pieces) * v;
    for (int s = 0; s < steps; ++s) q[static_cast<std::size_t>(i)] = map.inverse_lift(q[static_cast<std::size_t>(i)]);
  }
  double len = 0.0;
  for (int i = 0; i < pieces; ++i) len += norm(q[static_cast<std::size_t>(i) + 1] - q[static_cast<std::size_t>(i)]);
  return len;
}

bool same_measure(const FoliatedMeasure& a, const FoliatedMeasure& b) {
  if (a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    const auto& x = a.segments[i];
    const auto& y = b.segments[i];
    if (x.points.size() != y.points.size() || std::abs(x.weight - y.weight) > 1e-15) return false;
    for (std::size_t k = 0; k < x.points.size(); ++k)
      if (norm(x.points[k] - y.points[k]) > 1e-13 || std::abs(x.density[k] - y.density[k]) > 1e-12 * x.density[k])
        return false;
  }
  return true;
}

double w1(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return exact_plan(a, b, cost_matrix(a, b, CostSpec::distance())).cost;
}

}  // namespace

double default_kappa(const CouplingParams& params, double beta) {
  const double r = params.delta_minus / 10;
  return 0.9 * params.K0 / (std::pow(r, -beta) + 2 * params.K0);
}

PartialCoupling partial_couple(const ToralMap& map, const FoliatedMeasure& mu1, const FoliatedMeasure& mu2,
                               const CouplingParams& params, double mass) {
  if (params.blocks < 1 || !(params.delta_minus > 0.0) || !(params.K0 > 0.0))
    throw Error(ErrorKind::InvalidArgument, "coupling needs blocks >= 1, delta_minus > 0 and K0 > 0");
  const double beta = mu1.beta;
  const double kappa = params.kappa > 0.0 ? params.kappa : default_kappa(params, beta);
  if (kappa >= 1.0) throw Error(ErrorKind::InvalidArgument, "tent fraction must be < 1");
  const double r = params.delta_minus / 10;
  const int n_blocks = params.blocks * params.blocks;

  PartialCoupling pc;
  double overlap = 0.0;
  pc.block = best_block(mu1, mu2, params.blocks, overlap);
  if (overlap < 1.0 / n_blocks) throw Error(ErrorKind::NoOverlap, "no region carries 1/N of both measures");
  const Vec2 c{(pc.block / params.blocks + 0.5) / params.blocks, (pc.block % params.blocks + 0.5) / params.blocks};
  const Vec2 e = map.stable_field().at(c);

  const auto a_list = find_crossings(mu1, c, e, params.delta_minus, r, kappa);
  const auto b_list = find_crossings(mu2, c, e, params.delta_minus, r, kappa);
  double c1 = 0.0, c2 = 0.0;
  for (const auto& x : a_list) c1 += x.capacity;
  for (const auto& x : b_list) c2 += x.capacity;
  pc.capacity = std::min(c1, c2);
  if (!(pc.capacity > 0.0)) throw Error(ErrorKind::NoOverlap, "no leaf crosses the transversal with room for a tent");
  if (mass <= 0.0) mass = pc.capacity;
  if (mass > pc.capacity * (1 + 1e-12)) throw Error(ErrorKind::NoOverlap, "requested mass exceeds the tent capacity");
  pc.mass = mass;

  // monotone coupling of the normalized tent masses along the transversal
  struct Match {
    std::size_t a, b;
    double q;
  };
  std::vector<Match> matches;
  const auto cumulative = [](const std::vector<Crossing>& list, double total) {
    std::vector<double> cum(list.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < list.size(); ++i) cum[i] = acc += list[i].capacity / total;
    cum.back() = 1.0;
    return cum;
  };
  const auto ca = cumulative(a_list, c1), cb = cumulative(b_list, c2);
  double pos = 0.0;
  for (std::size_t i = 0, j = 0; i < ca.size() && j < cb.size();) {
    const double next = std::min(ca[i], cb[j]);
    if (next > pos) matches.push_back({i, j, next - pos});
    pos = next;
    if (ca[i] == next) ++i;
    if (cb[j] == next) ++j;
  }

  std::vector<double> h1(a_list.size()), h2(b_list.size());
  for (std::size_t a = 0; a < a_list.size(); ++a) h1[a] = mass / c1 * a_list[a].capacity / a_list[a].unit_mass;
  for (std::size_t b = 0; b < b_list.size(); ++b) h2[b] = mass / c2 * b_list[b].capacity / b_list[b].unit_mass;
  pc.residual1 = residual_of(mu1, a_list, h1, r, pc.slice1);
  pc.residual2 = residual_of(mu2, b_list, h2, r, pc.slice2);
  pc.residual1.declared_K = regularity_estimate(pc.residual1, map.e_u()).K_density;
  pc.residual2.declared_K = regularity_estimate(pc.residual2, map.e_u()).K_density;

  for (const auto& m : matches) {
    const auto& xa = a_list[m.a];
    const auto& xb = b_list[m.b];
    const auto& sa = mu1.segments[xa.seg];
    const auto& sb = mu2.segments[xb.seg];
    const Vec2 v = xb.x - xa.x;
    double mismatch = 0.0;
    for (double d : {-r, -0.5 * r, 0.0, 0.5 * r, r}) {
      const Vec2 pa = leaf_point(sa, xa.s + d, xa.s, xa.x) + v;
      const Vec2 pb = leaf_point(sb, xb.s + d, xb.s, xb.x);
      mismatch = std::max(mismatch, norm(pa - pb));
    }
    pc.mismatch = std::max(pc.mismatch, mismatch);
    CoupledPair p;
    p.source = wrap01(c + xa.x);
    p.target = wrap01(c + xb.x);
    p.mass = mass * m.q;
    p.stable_length = norm(v) + mismatch;
    p.pulled_back_length = p.stable_length;
    pc.pairs.push_back(p);
  }
  return pc;
}

AnosovConstants anosov_constants(double lambda0, double beta, double tau, int n0, double L0) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0) || !(tau > 0.0 && tau < 1.0) || n0 < 1 || !(L0 > 0.0) || !(beta > 0.0))
    throw Error(ErrorKind::InvalidArgument, "need lambda0, tau in (0,1), n0 >= 1, L0 > 0, beta > 0");
  AnosovConstants k;
  k.lambda0 = lambda0;
  k.beta = beta;
  k.tau = tau;
  k.n0 = n0;
  k.L0 = L0;
  k.beta0 = std::min(1.0, std::log1p(-tau) / (n0 * std::log(lambda0)));
  k.ratio = (1 - tau) * std::pow(lambda0, -beta * n0);
  if (beta >= k.beta0 || k.ratio >= 1.0)
    throw Error(ErrorKind::DivergentSeries, "beta must be below beta0 = " + std::to_string(k.beta0));
  k.series_bound = tau * std::pow(L0, beta) / (1 - k.ratio);
  return k;
}

double stable_return_length(const ToralMap& map, double delta_minus, int blocks) {
  const Vec2 eu = map.e_u(), es = map.e_s();
  const double tol = delta_minus / 100;
  if (std::abs(eu.y) < 1e-12) throw Error(ErrorKind::InvalidArgument, "unstable direction is rational");
  double worst = 0.0;
  for (int bx = 0; bx < blocks; ++bx)
    for (int by = 0; by < blocks; ++by) {
      const Vec2 d0{static_cast<double>(bx) / blocks, static_cast<double>(by) / blocks};
      double best = 1e300;
      for (long reach = 4;; reach *= 2) {
        for (long k1 = -reach; k1 <= reach; ++k1) {
          const double x = d0.x + static_cast<double>(k1);
          const double k2c = -x * eu.x / eu.y - d0.y;
          for (double k2 : {std::floor(k2c), std::ceil(k2c)}) {
            const Vec2 d{x, d0.y + k2};
            if (std::abs(dot(d, eu)) <= tol) best = std::min(best, std::abs(dot(d, es)));
          }
        }
        if (best < 1e300 && static_cast<double>(reach) >= best + 2) break;
        if (reach > (1L << 24)) throw Error(ErrorKind::NoConvergence, "stable return search exhausted");
      }
      worst = std::max(worst, best);
    }
  return worst;
}

double coupling_L0(const ToralMap& map, const CouplingParams& params) {
  const double base = stable_return_length(map, params.delta_minus, params.blocks) + 2 * params.delta_plus;
  return map.is_linear() ? base : 2 * base;
}

CouplingReport stable_coupling(const ToralMap& map, const FoliatedMeasure& mu1, const FoliatedMeasure& mu2,
                               double beta, int k, const CouplingParams& params, int reconstruction_grid) {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0, 1]");
  if (k < 0 || params.n0 < 1) throw Error(ErrorKind::InvalidArgument, "need rounds >= 0 and n0 >= 1");
  CouplingReport rep;
  rep.rounds = k;
  CouplingParams p = params;
  p.kappa = params.kappa > 0.0 ? params.kappa : default_kappa(params, beta);
  rep.kappa = p.kappa;
  const double L0 = params.L0 > 0.0 ? params.L0 : coupling_L0(map, params);

  FoliatedMeasure cur1 = mu1, cur2 = mu2;
  cur1.beta = cur2.beta = beta;
  const double tau = 0.5 * partial_couple(map, cur1, cur2, p).capacity;
  rep.constants = anosov_constants(map.lambda0(), beta, tau, p.n0, L0);

  WeightedPoints rec1, rec2;
  const auto append = [&](WeightedPoints& dst, const WeightedPoints& src, double scale, int steps) {
    for (std::size_t i = 0; i < src.points.size(); ++i) {
      dst.points.push_back(pull_back(map, src.points[i], steps));
      dst.masses.push_back(src.masses[i] * scale);
    }
  };
  const double lambda0 = map.lambda0();
  double scale = 1.0;
  for (int j = 0; j <= k; ++j) {
    const int back = j * p.n0;
    auto pc = partial_couple(map, cur1, cur2, p, tau);
    CouplingRound round;
    round.round = j;
    round.coupled_mass = scale * tau;
    round.pairs = static_cast<int>(pc.pairs.size());
    round.mismatch = pc.mismatch;
    for (auto& pair : pc.pairs) {
      const Vec2 v = wrap_delta(pair.target - pair.source);
      const double geometric = norm(v);
      pair.pulled_back_length = pulled_back_length(map, pair.source, v, back) +
                                (pair.stable_length - geometric) * std::pow(lambda0, -back);
      pair.round = j;
      pair.mass *= scale;
      round.cost += pair.mass * std::pow(pair.pulled_back_length, beta);
      round.max_stable_length = std::max(round.max_stable_length, pair.stable_length);
      rep.pairs.push_back(pair);
    }
    round.cost_bound = tau * scale * std::pow(L0, beta) * std::pow(lambda0, -j * beta * p.n0);
    append(rec1, pc.slice1, scale, back);
    append(rec2, pc.slice2, scale, back);
    scale *= 1 - tau;
    round.residual_mass = scale;
    round.residual_K1 = pc.residual1.declared_K;
    round.residual_K2 = pc.residual2.declared_K;
    rep.bound += round.cost;
    rep.history.push_back(round);
    cur1 = std::move(pc.residual1);
    cur2 = std::move(pc.residual2);
    if (j < k) {
      cur1 = leaf_pushforward(map, cur1, p.n0);
      cur2 = leaf_pushforward(map, cur2, p.n0);
    }
  }
  rep.residual_mass = scale;
  rep.residuals_identical = same_measure(cur1, cur2);
  const double r = rep.constants.ratio;
  rep.tail = rep.residuals_identical ? 0.0 : tau * std::pow(L0, beta) * std::pow(r, k + 1) / (1 - r);
  rep.bound += rep.tail;

  append(rec1, quadrature_points(cur1), scale, k * p.n0);
  append(rec2, quadrature_points(cur2), scale, k * p.n0);
  rep.reconstruction_w1_1 = w1(deposit(rec1, reconstruction_grid), discretize(mu1, reconstruction_grid));
  rep.reconstruction_w1_2 = w1(deposit(rec2, reconstruction_grid), discretize(mu2, reconstruction_grid));
  return rep;
}

}  // namespace fol
