#include "fol/correlate.hpp"

#include <cmath>

#include "fol/error.hpp"
#include "fol/parallel.hpp"

namespace fol {

namespace {

constexpr int kSeminormBase = 64;

/// Follows the line field from x for signed arclength s (midpoint rule).
Vec2 follow(const DirectionField& field, Vec2 x, double s) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(s) / 0.005)));
  const double h = s / steps;
  Vec2 prev = field.at(wrap01(x));
  for (int i = 0; i < steps; ++i) {
    Vec2 d = field.at(wrap01(x));
    if (dot(d, prev) < 0.0) d = -d;
    Vec2 m = field.at(wrap01(x + 0.5 * h * d));
    if (dot(m, d) < 0.0) m = -m;
    x += h * m;
    prev = m;
  }
  return x;
}

double kahan_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

std::vector<double> default_seminorm_scales() {
  std::vector<double> s;
  for (int k = 0; k <= 5; ++k) s.push_back(0.1 * std::pow(4.0, -k));
  return s;
}

SeminormProfile leafwise_holder_seminorm(const Observable2D& f, const DirectionField& field, double beta,
                                         const std::vector<double>& scales) {
  if (scales.empty() || !(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "need beta > 0 and some scales");
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (!(scales[i] > 0.0) || (i > 0 && scales[i] >= scales[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "scales must be positive and decreasing");
  const int B = kSeminormBase;
  SeminormProfile prof;
  prof.scales = scales;
  for (double s : scales) {
    std::vector<double> worst(static_cast<std::size_t>(B) * B);
    parallel_for(
        worst.size(),
        [&](std::size_t k) {
          const Vec2 x{static_cast<double>(k / B) / B, static_cast<double>(k % B) / B};
          const double fx = f(x);
          const double a = std::abs(fx - f(wrap01(follow(field, x, s))));
          const double b = std::abs(fx - f(wrap01(follow(field, x, -s))));
          worst[k] = std::max(a, b) / std::pow(s, beta);
        },
        64);
    double m = 0.0;
    for (double w : worst) m = std::max(m, w);
    prof.values.push_back(m);
    prof.value = std::max(prof.value, m);
  }
  const std::size_t n = prof.values.size();
  prof.infinite = n >= 2 && prof.values[n - 1] > 2 * prof.values[n - 2];
  return prof;
}

std::vector<double> correlation_sequence(const ToralMap& map, const Observable2D& f, const Observable2D& g,
                                         const DiscreteMeasure& mu0, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  const std::size_t m = mu0.size();
  const auto rows = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> gw(m);
  for (std::size_t i = 0; i < m; ++i) gw[i] = mu0.weights[i] * g(mu0.points[i]);
  const double g_mean = kahan_sum(gw) / kahan_sum(mu0.weights);
  std::vector<double> terms(rows * m);
  parallel_for(
      m,
      [&](std::size_t i) {
        Vec2 x = mu0.points[i];
        const double gi = mu0.weights[i] * (g(x) - g_mean);
        for (std::size_t n = 0; n < rows; ++n) {
          terms[n * m + i] = f(x) * gi;
          x = map(x);
        }
      },
      256);
  std::vector<double> out(rows);
  for (std::size_t n = 0; n < rows; ++n) {
    const std::vector<double> row(terms.begin() + static_cast<long>(n * m), terms.begin() + static_cast<long>((n + 1) * m));
    out[n] = kahan_sum(row);
  }
  return out;
}

int agreeing_prefix(const std::vector<double>& a, const std::vector<double>& b, double rel, double abs) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!(std::abs(a[i] - b[i]) <= rel * std::abs(b[i]) + abs)) return static_cast<int>(i) - 1;
  return static_cast<int>(n) - 1;
}

int frequency_escape_time(const Mat2& linear, const std::vector<Frequency>& f_freqs,
                          const std::vector<Frequency>& g_freqs, int n_max) {
  const long a = std::lround(linear.a), b = std::lround(linear.b), c = std::lround(linear.c), d = std::lround(linear.d);
  int last_hit = -1;
  for (const auto& k : f_freqs) {
    if (k[0] == 0 && k[1] == 0) continue;
    long x = k[0], y = k[1];
    for (int n = 0; n <= n_max; ++n) {
      for (const auto& l : g_freqs)
        if (x + l[0] == 0 && y + l[1] == 0) last_hit = std::max(last_hit, n);
      // k -> A^T k
      const long nx = a * x + c * y, ny = b * x + d * y;
      x = nx;
      y = ny;
    }
  }
  return last_hit + 1;
}

DecayFit fit_decay(const std::vector<double>& values, int n_lo, int n_hi) {
  const int last = static_cast<int>(values.size()) - 1;
  if (n_hi < 0 || n_hi > last) n_hi = last;
  n_lo = std::max(0, n_lo);
  std::vector<double> xs, ys;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double v = std::abs(values[static_cast<std::size_t>(n)]);
    if (v > kDecayNoiseFloor && std::isfinite(v)) {
      xs.push_back(n);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 4) throw Error(ErrorKind::InsufficientData, "fewer than 4 entries above the noise floor");
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / k;
    my += ys[i] / k;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx, intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    rss += e * e;
  }
  DecayFit fit;
  fit.C = std::exp(intercept);
  fit.rate = std::exp(slope);
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.residual = std::sqrt(rss / k);
  fit.used = static_cast<int>(xs.size());
  return fit;
}

}  // namespace fol
