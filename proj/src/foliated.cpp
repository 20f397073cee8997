#include "fol/foliated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fol/error.hpp"
#include "fol/parallel.hpp"

namespace fol {

namespace {

void shift_to_base(LeafSegment& seg) {
  const Vec2 k{std::floor(seg.points.front().x), std::floor(seg.points.front().y)};
  if (k.x == 0.0 && k.y == 0.0) return;
  for (auto& p : seg.points) p -= k;
}

void normalize_density(LeafSegment& seg) {
  const double m = leaf_integral(seg.density, seg.ds);
  for (auto& v : seg.density) v /= m;
}

double sampled_holder(const std::vector<double>& v, double ds, double beta) {
  const std::size_t n = v.size();
  double best = 0.0;
  for (std::size_t sep = 1; sep < n; sep *= 2) {
    const double scale = std::pow(static_cast<double>(sep) * ds, beta);
    double worst = 0.0;
    for (std::size_t i = 0; i + sep < n; ++i) worst = std::max(worst, std::abs(v[i + sep] - v[i]));
    best = std::max(best, worst / scale);
  }
  return best;
}

void sort_segments(std::vector<LeafSegment>& segs) {
  std::vector<std::size_t> idx(segs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Vec2 pa = segs[a].points.front(), pb = segs[b].points.front();
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return segs[a].points.size() < segs[b].points.size();
  });
  std::vector<LeafSegment> out;
  out.reserve(segs.size());
  for (auto i : idx) out.push_back(std::move(segs[i]));
  segs = std::move(out);
}

std::vector<LeafSegment> push_segment(const ToralMap& map, const LeafSegment& seg) {
  const std::size_t n = seg.points.size();
  const auto& P = seg.points;
  std::vector<double> sigma(n, 0.0), r(n);
  Vec2 prev = map.lift(P[0]);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 t = normalized(i == 0 ? P[1] - P[0] : i + 1 == n ? P[i] - P[i - 1] : P[i + 1] - P[i - 1]);
    r[i] = seg.density[i] / norm(map.differential(P[i]) * t);
    if (i > 0) {
      const Vec2 q = map.lift(P[i]);
      sigma[i] = sigma[i - 1] + norm(q - prev);
      prev = q;
    }
  }
  const double L = sigma.back();
  const int pieces = std::max(1, static_cast<int>(std::ceil(L / kLeafCap - 1e-9)));
  const double len = L / pieces;
  const int m = std::max(1, static_cast<int>(std::ceil(len / kLeafSpacing - 1e-9)));
  std::vector<LeafSegment> out(static_cast<std::size_t>(pieces));
  std::vector<double> mass(out.size());
  std::size_t i = 0;
  for (int p = 0; p < pieces; ++p) {
    auto& piece = out[static_cast<std::size_t>(p)];
    piece.ds = len / m;
    piece.points.resize(static_cast<std::size_t>(m) + 1);
    piece.density.resize(piece.points.size());
    for (int k = 0; k <= m; ++k) {
      const double s = std::min(L, len * p + piece.ds * k);
      while (i + 2 < n && sigma[i + 1] < s) ++i;
      const double span = sigma[i + 1] - sigma[i];
      const double f = span > 0.0 ? std::clamp((s - sigma[i]) / span, 0.0, 1.0) : 0.0;
      piece.points[static_cast<std::size_t>(k)] = map.lift(P[i] + f * (P[i + 1] - P[i]));
      piece.density[static_cast<std::size_t>(k)] = r[i] + f * (r[i + 1] - r[i]);
    }
    mass[static_cast<std::size_t>(p)] = leaf_integral(piece.density, piece.ds);
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  double assigned = 0.0;
  for (std::size_t p = 0; p < out.size(); ++p) {
    auto& piece = out[p];
    for (auto& v : piece.density) v /= mass[p];
    piece.weight = p + 1 < out.size() ? seg.weight * mass[p] / total : seg.weight - assigned;
    assigned += piece.weight;
    shift_to_base(piece);
    for (std::size_t k = 0; k + 1 < piece.points.size(); ++k) {
      if (!map.cones().contains(wrap01(piece.points[k]), piece.points[k + 1] - piece.points[k]))
        throw Error(ErrorKind::ConeViolation, "pushed leaf left the unstable cone");
    }
  }
  return out;
}

}  // namespace

double FoliatedMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& seg : segments) s += seg.weight;
  return s;
}

double leaf_integral(const std::vector<double>& values, double ds) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * ds;
}

LeafSegment make_segment(Vec2 base, Vec2 dir, double length, const std::function<double(double)>& density,
                         double weight, double spacing) {
  if (!(length > 0.0) || !(spacing > 0.0) || !(weight >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "segment needs positive length and spacing, weight >= 0");
  const int m = std::max(1, static_cast<int>(std::ceil(length / spacing - 1e-9)));
  LeafSegment seg;
  seg.ds = length / m;
  seg.weight = weight;
  const Vec2 u = normalized(dir);
  for (int i = 0; i <= m; ++i) {
    const double s = seg.ds * i;
    const double v = density(s);
    if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "leaf density must be positive");
    seg.points.push_back(base + s * u);
    seg.density.push_back(v);
  }
  normalize_density(seg);
  shift_to_base(seg);
  return seg;
}

FoliatedMeasure lebesgue_foliated(Vec2 dir, double chord_spacing, double beta) {
  if (!(chord_spacing > 0.0) || chord_spacing > 0.5)
    throw Error(ErrorKind::InvalidArgument, "chord spacing must lie in (0, 1/2]");
  const Vec2 e = normalized(dir), nrm = perp(e);
  double cmin = 1e300, cmax = -1e300;
  for (Vec2 corner : {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}, Vec2{1, 1}}) {
    cmin = std::min(cmin, dot(corner, nrm));
    cmax = std::max(cmax, dot(corner, nrm));
  }
  FoliatedMeasure mu;
  mu.beta = beta;
  const int lines = static_cast<int>(std::ceil((cmax - cmin) / chord_spacing));
  const double step = (cmax - cmin) / lines;
  for (int k = 0; k < lines; ++k) {
    const Vec2 o = (cmin + (k + 0.5) * step) * nrm;
    // clip o + t e to the unit square
    double t0 = -1e300, t1 = 1e300;
    for (int axis = 0; axis < 2; ++axis) {
      const double oc = axis ? o.y : o.x, ec = axis ? e.y : e.x;
      if (std::abs(ec) < 1e-15) {
        if (oc < 0.0 || oc > 1.0) t1 = -1e300;
        continue;
      }
      const double a = -oc / ec, b = (1.0 - oc) / ec;
      t0 = std::max(t0, std::min(a, b));
      t1 = std::min(t1, std::max(a, b));
    }
    const double chord = t1 - t0;
    if (!(chord > 1e-9)) continue;
    const int pieces = static_cast<int>(std::ceil(chord / kLeafCap - 1e-9));
    const double len = chord / pieces;
    for (int p = 0; p < pieces; ++p)
      mu.segments.push_back(
          make_segment(o + (t0 + p * len) * e, e, len, [](double) { return 1.0; }, len * step));
  }
  const double total = mu.total_mass();
  for (auto& seg : mu.segments) seg.weight /= total;
  sort_segments(mu.segments);
  return mu;
}

double sampled_log_holder(const std::vector<double>& values, double ds, double beta) {
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "log-Hoelder needs positive values");
    logs[i] = std::log(values[i]);
  }
  return sampled_holder(logs, ds, beta);
}

RegularityEstimate regularity_estimate(const FoliatedMeasure& mu, Vec2 frame) {
  const std::size_t n = mu.segments.size();
  std::vector<double> kd(n), kg(n);
  parallel_for(
      n,
      [&](std::size_t s) {
        const auto& seg = mu.segments[s];
        kd[s] = sampled_log_holder(seg.density, seg.ds, mu.beta);
        std::vector<double> angle;
        for (std::size_t k = 0; k + 1 < seg.points.size(); ++k) {
          const Vec2 t = seg.points[k + 1] - seg.points[k];
          angle.push_back(std::atan2(cross(frame, t), dot(frame, t)));
        }
        kg[s] = sampled_holder(angle, seg.ds, mu.beta);
      },
      16);
  RegularityEstimate r;
  for (std::size_t s = 0; s < n; ++s) {
    r.K_density = std::max(r.K_density, kd[s]);
    r.K_graph = std::max(r.K_graph, kg[s]);
  }
  return r;
}

double leafwise_log_holder(const FoliatedMeasure& mu, const Observable2D& f) {
  std::vector<double> k(mu.segments.size());
  parallel_for(
      k.size(),
      [&](std::size_t s) {
        const auto& seg = mu.segments[s];
        std::vector<double> v(seg.points.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(wrap01(seg.points[i]));
        k[s] = sampled_log_holder(v, seg.ds, mu.beta);
      },
      16);
  return k.empty() ? 0.0 : *std::max_element(k.begin(), k.end());
}

FoliatedMeasure reweight(const FoliatedMeasure& mu, const Observable2D& rho) {
  FoliatedMeasure out = mu;
  parallel_for(
      out.segments.size(),
      [&](std::size_t s) {
        auto& seg = out.segments[s];
        for (std::size_t i = 0; i < seg.points.size(); ++i) {
          const double v = rho(wrap01(seg.points[i]));
          if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "reweighting function must be positive");
          seg.density[i] *= v;
        }
        const double m = leaf_integral(seg.density, seg.ds);
        for (auto& v : seg.density) v /= m;
        seg.weight *= m;
      },
      16);
  const double total = out.total_mass();
  for (auto& seg : out.segments) seg.weight /= total;
  out.declared_K = mu.declared_K + leafwise_log_holder(mu, rho);
  return out;
}

FoliatedMeasure leaf_pushforward(const ToralMap& map, const FoliatedMeasure& mu, int steps, double H) {
  if (steps < 0) throw Error(ErrorKind::InvalidArgument, "steps must be >= 0");
  const double lambda_prime = std::pow(map.unstable_expansion(), -mu.beta);
  FoliatedMeasure cur = mu;
  for (int step = 0; step < steps; ++step) {
    std::vector<std::vector<LeafSegment>> parts(cur.segments.size());
    parallel_for(
        parts.size(), [&](std::size_t s) { parts[s] = push_segment(map, cur.segments[s]); }, 8);
    std::vector<LeafSegment> next;
    for (auto& p : parts)
      for (auto& seg : p) next.push_back(std::move(seg));
    sort_segments(next);
    cur.segments = std::move(next);
    cur.declared_K = lambda_prime * (cur.declared_K + H);
  }
  return cur;
}

WeightedPoints quadrature_points(const FoliatedMeasure& mu) {
  WeightedPoints out;
  for (const auto& seg : mu.segments) {
    const std::size_t n = seg.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double end = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      out.points.push_back(wrap01(seg.points[i]));
      out.masses.push_back(seg.weight * seg.ds * end * seg.density[i]);
    }
  }
  return out;
}

DiscreteMeasure deposit(const WeightedPoints& pts, int grid_size) {
  if (grid_size < 1) throw Error(ErrorKind::InvalidArgument, "grid size must be >= 1");
  const int g = grid_size;
  DiscreteMeasure mu = DiscreteMeasure::uniform_grid(g);
  std::fill(mu.weights.begin(), mu.weights.end(), 0.0);
  const auto cell = [g](double v) { return ((static_cast<long>(std::floor(v)) % g) + g) % g; };
  for (std::size_t k = 0; k < pts.points.size(); ++k) {
    const double gx = pts.points[k].x * g - 0.5, gy = pts.points[k].y * g - 0.5;
    const double fx = gx - std::floor(gx), fy = gy - std::floor(gy);
    const long i0 = cell(gx), i1 = (i0 + 1) % g, j0 = cell(gy), j1 = (j0 + 1) % g;
    const double m = pts.masses[k];
    mu.weights[static_cast<std::size_t>(i0 * g + j0)] += m * (1 - fx) * (1 - fy);
    mu.weights[static_cast<std::size_t>(i0 * g + j1)] += m * (1 - fx) * fy;
    mu.weights[static_cast<std::size_t>(i1 * g + j0)] += m * fx * (1 - fy);
    mu.weights[static_cast<std::size_t>(i1 * g + j1)] += m * fx * fy;
  }
  return normalized(mu);
}

DiscreteMeasure discretize(const FoliatedMeasure& mu, int grid_size) {
  return deposit(quadrature_points(mu), grid_size);
}

DiscreteMeasure srb_estimate(const ToralMap& map, int steps, int grid_size) {
  if (steps < 0 || grid_size < 1) throw Error(ErrorKind::InvalidArgument, "need steps >= 0 and grid size >= 1");
  DiscreteMeasure mu = DiscreteMeasure::uniform_grid(grid_size);
  if (map.is_linear() || steps == 0) return mu;
  std::vector<double> logw(mu.size());
  parallel_for(
      mu.size(),
      [&](std::size_t k) {
        Vec2 y = mu.points[k];
        double s = 0.0;
        for (int j = 0; j < steps; ++j) {
          y = map.inverse(y);
          s -= std::log(std::abs(map.differential(y).det()));
        }
        logw[k] = s;
      },
      64);
  const double top = *std::max_element(logw.begin(), logw.end());
  for (std::size_t k = 0; k < mu.size(); ++k) mu.weights[k] = std::exp(logw[k] - top);
  return normalized(mu);
}

DiscreteMeasure aggregate(const DiscreteMeasure& mu, int grid_size) {
  if (grid_size < 1 || mu.dim != 2) throw Error(ErrorKind::InvalidArgument, "aggregate needs a torus measure");
  const int g = grid_size;
  DiscreteMeasure out = DiscreteMeasure::uniform_grid(g);
  std::fill(out.weights.begin(), out.weights.end(), 0.0);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const Vec2 p = wrap01(mu.points[k]);
    const int i = std::min(g - 1, static_cast<int>(p.x * g)), j = std::min(g - 1, static_cast<int>(p.y * g));
    out.weights[static_cast<std::size_t>(i * g + j)] += mu.weights[k];
  }
  return normalized(out);
}

double estimate_leaf_distortion(const ToralMap& map, double beta) {
  const double lambda_prime = std::pow(map.unstable_expansion(), -beta);
  const double len = 0.4;
  const std::vector<std::function<double(double)>> profiles = {
      [](double) { return 1.0; },
      [len](double s) { return std::exp(0.5 * std::sin(kTwoPi * s / len)); },
      [len](double s) { return std::exp(0.3 * std::cos(2 * kTwoPi * s / len)); },
  };
  const int bases = 4;
  std::vector<double> growth(static_cast<std::size_t>(bases * bases) * profiles.size(), 0.0);
  parallel_for(
      growth.size(),
      [&](std::size_t k) {
        const std::size_t b = k / profiles.size(), q = k % profiles.size();
        const Vec2 base{(static_cast<double>(b / bases) + 0.5) / bases, (static_cast<double>(b % bases) + 0.5) / bases};
        FoliatedMeasure probe;
        probe.beta = beta;
        probe.segments.push_back(make_segment(base, map.unstable_field().at(base), len, profiles[q], 1.0));
        const double k_in = sampled_log_holder(probe.segments[0].density, probe.segments[0].ds, beta);
        const auto image = leaf_pushforward(map, probe, 1);
        double k_out = 0.0;
        for (const auto& seg : image.segments)
          k_out = std::max(k_out, sampled_log_holder(seg.density, seg.ds, beta));
        growth[k] = k_out / lambda_prime - k_in;
      },
      1);
  return std::max(0.0, *std::max_element(growth.begin(), growth.end()));
}

LeafRegularity leaf_regularity(const ToralMap& map, double beta, double K_floor) {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0, 1]");
  LeafRegularity r;
  r.beta = beta;
  r.lambda_prime = std::pow(map.unstable_expansion(), -beta);
  r.H = estimate_leaf_distortion(map, beta);
  r.K0 = std::max(2 * r.lambda_prime * r.H / (1 - r.lambda_prime), K_floor);
  double K = 2 * r.K0;
  r.n0 = 0;
  while (K > r.K0) {
    K = r.h(K);
    if (++r.n0 > 1000000) throw Error(ErrorKind::NoConvergence, "regularization step count diverged");
  }
  const double rhs = r.lambda_prime / (1 - r.lambda_prime);
  r.n0_displayed = 1;
  while (2 * std::pow(r.lambda_prime, r.n0_displayed) > rhs) ++r.n0_displayed;
  return r;
}

}  // namespace fol
