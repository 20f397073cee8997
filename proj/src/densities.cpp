#include "fol/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fol/error.hpp"
#include "fol/parallel.hpp"

namespace fol {

double grid_integral(const std::vector<double>& samples) {
  double sum = 0.0, comp = 0.0;
  for (double v : samples) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(samples.size());
}

HolderDensity::HolderDensity(std::vector<double> samples, double alpha) : samples_(std::move(samples)), alpha_(alpha) {
  if (samples_.size() < 2) throw Error(ErrorKind::InvalidArgument, "density needs at least two samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!(samples_[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveWeight, "density sample " + std::to_string(i) + " is not positive");
    }
  }
  raw_integral_ = grid_integral(samples_);
  if (raw_integral_ != 1.0) {
    for (double& v : samples_) v /= raw_integral_;
  }
}

HolderDensity HolderDensity::constant(int grid_size, double alpha) {
  return HolderDensity(std::vector<double>(grid_size, 1.0), alpha);
}

HolderDensity HolderDensity::from_function(int grid_size, const Observable1D& f, double alpha) {
  std::vector<double> s(grid_size);
  for (int i = 0; i < grid_size; ++i) s[i] = f(static_cast<double>(i) / grid_size);
  return HolderDensity(std::move(s), alpha);
}

double HolderDensity::operator()(double x) const {
  const int n = size();
  const double g = wrap01(x) * n;
  const int i = std::min(static_cast<int>(g), n - 1);
  const double f = g - i;
  return samples_[i] + f * (samples_[(i + 1) % n] - samples_[i]);
}

double HolderDensity::min() const { return *std::min_element(samples_.begin(), samples_.end()); }

TransferOperator::TransferOperator(const ExpandingMap1D& map, int grid_size) : map_(map), grid_size_(grid_size) {
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  const int k = map.degree();
  const std::size_t count = static_cast<std::size_t>(k) * grid_size + 1;
  edges_.resize(count);
  parallel_for(count, [&](std::size_t m) {
    const double c = (static_cast<double>(m) - 0.5) / grid_size;
    edges_[m] = map_.solve_lift(c) * grid_size;
  });
}

namespace {

// Integral of the periodic piecewise-linear interpolant over [a, b], both in
// grid units, scaled by N (so a full period integrates to N * mean).
double interval_integral(const std::vector<double>& rho, double a, double b) {
  const long n = static_cast<long>(rho.size());
  double sum = 0.0;
  for (long c = static_cast<long>(std::floor(a)); c < b; ++c) {
    const double s0 = std::max(a, static_cast<double>(c)) - c;
    const double s1 = std::min(b, static_cast<double>(c + 1)) - c;
    if (s1 <= s0) continue;
    const long i0 = ((c % n) + n) % n;
    const long i1 = (i0 + 1) % n;
    const double r0 = rho[i0];
    const double r1 = rho[i1];
    sum += (s1 - s0) * (r0 + 0.5 * (r1 - r0) * (s1 + s0));
  }
  return sum;
}

}  // namespace

std::vector<double> TransferOperator::apply(const std::vector<double>& samples) const {
  if (static_cast<int>(samples.size()) != grid_size_) {
    throw Error(ErrorKind::InvalidArgument, "density grid does not match the operator grid");
  }
  const int k = map_.degree();
  std::vector<double> out(grid_size_);
  parallel_for(out.size(), [&](std::size_t i) {
    double v = 0.0;
    for (int j = 0; j < k; ++j) {
      const std::size_t m = i + static_cast<std::size_t>(j) * grid_size_;
      v += interval_integral(samples, edges_[m], edges_[m + 1]);
    }
    out[i] = v;
  });
  return out;
}

HolderDensity TransferOperator::apply(const HolderDensity& rho) const {
  return HolderDensity(apply(rho.samples()), rho.alpha());
}

HolderDensity transfer_apply(const ExpandingMap1D& map, const HolderDensity& rho) {
  return TransferOperator(map, rho.size()).apply(rho);
}

ConeConstants cone_constants(double lambda_alpha, double distortion) {
  if (!(lambda_alpha > 0.0 && lambda_alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda^alpha must lie in (0,1)");
  }
  ConeConstants c;
  c.lambda_alpha = lambda_alpha;
  c.distortion = distortion;
  c.K0 = 2.0 * lambda_alpha * distortion / (1.0 - lambda_alpha);
  const double rhs = lambda_alpha / (1.0 - lambda_alpha);
  int n = 1;
  while (2.0 * std::pow(lambda_alpha, n) > rhs) ++n;
  c.n0 = n;
  c.tau = 0.5 * std::exp(-c.K0);
  c.theta = std::exp(std::log1p(-c.tau) / c.n0);
  return c;
}

ConeConstants cone_constants(const ExpandingMap1D& map) {
  return cone_constants(std::pow(map.lambda(), map.alpha()), map.distortion());
}

InvariantDensity invariant_density(const TransferOperator& op, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  constexpr int kStall = 50;
  constexpr int kMaxIterations = 100000;
  const double alpha = op.map().alpha();
  InvariantDensity out;
  HolderDensity rho = HolderDensity::constant(op.grid_size(), alpha);
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int it = 1;; ++it) {
    HolderDensity next = op.apply(rho);
    double residual = 0.0;
    for (int i = 0; i < op.grid_size(); ++i) {
      residual = std::max(residual, std::abs(next.samples()[i] - rho.samples()[i]));
    }
    rho = std::move(next);
    if (residual <= tol) {
      out.residual = residual;
      out.iterations = it;
      break;
    }
    if (residual < best) {
      best = residual;
      stall = 0;
    } else if (++stall >= kStall) {
      throw Error(ErrorKind::NoConvergence, "residual stuck at " + std::to_string(best) + " above tol");
    }
    if (it >= kMaxIterations) throw Error(ErrorKind::NoConvergence, "iteration cap reached");
  }
  out.density = std::move(rho);
  out.log_holder = holder_log_constant(out.density, alpha);
  out.log_holder_bound = 0.5 * cone_constants(op.map()).K0 * 1.1;
  out.regularity_ok = out.log_holder <= out.log_holder_bound;
  return out;
}

InvariantDensity invariant_density(const ExpandingMap1D& map, double tol, int grid_size) {
  return invariant_density(TransferOperator(map, grid_size), tol);
}

namespace {

template <typename Fn>
std::vector<double> dyadic_profile(Fn&& u, double alpha) {
  std::vector<double> out;
  for (int j = 3; j <= 12; ++j) {
    const double s = std::ldexp(1.0, -j);
    const double scale = std::pow(s, alpha);
    double best = 0.0;
    for (int b = 0; b < 256; ++b) {
      const double x = b / 256.0;
      best = std::max(best, std::abs(u(x) - u(wrap01(x + s))) / scale);
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace

std::vector<double> holder_log_profile(const HolderDensity& rho, double alpha) {
  return dyadic_profile([&](double x) { return std::log(rho(x)); }, alpha);
}

double holder_log_constant(const HolderDensity& rho, double alpha) {
  const auto p = holder_log_profile(rho, alpha);
  return *std::max_element(p.begin(), p.end());
}

double holder_seminorm(const Observable1D& f, double alpha) {
  const auto p = dyadic_profile(f, alpha);
  return *std::max_element(p.begin(), p.end());
}

HolderDensity coupling_residual(const HolderDensity& rho, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "tau must lie in (0,1)");
  std::vector<double> s(rho.samples());
  for (double& v : s) v = (v - tau) / (1.0 - tau);
  return HolderDensity(std::move(s), rho.alpha());
}

std::vector<double> expanding_decay(const TransferOperator& op, const HolderDensity& rho0, const Observable1D& f,
                                    const Observable1D& g, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  const int n = op.grid_size();
  if (rho0.size() != n) throw Error(ErrorKind::InvalidArgument, "invariant density grid mismatch");
  std::vector<double> fs(n), gs(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    fs[i] = f(x);
    gs[i] = g(x);
  }
  const auto& r0 = rho0.samples();
  for (int i = 0; i < n; ++i) w[i] = gs[i] * r0[i];
  const double mean_g = grid_integral(w);

  // C_n = int f L^n((g - mean g) rho0) dm, by linearity of L
  std::vector<double> out(n_max + 1, 0.0);
  std::vector<double> rho(n);
  for (int i = 0; i < n; ++i) rho[i] = (gs[i] - mean_g) * r0[i];
  for (int k = 0; k <= n_max; ++k) {
    for (int i = 0; i < n; ++i) w[i] = fs[i] * rho[i];
    out[k] = grid_integral(w);
    if (k < n_max) rho = op.apply(rho);
  }
  return out;
}

std::vector<double> expanding_decay(const ExpandingMap1D& map, const Observable1D& f, const Observable1D& g,
                                    int n_max, double tol) {
  const TransferOperator op(map);
  const auto inv = invariant_density(op, tol);
  return expanding_decay(op, inv.density, f, g, n_max);
}

}  // namespace fol
