#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fol/densities.hpp"
#include "fol/error.hpp"

using namespace fol;

namespace {

constexpr double kPi = std::numbers::pi;

// log rho = sum of a few random Fourier modes
HolderDensity random_density(std::mt19937_64& rng, int n, double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a[4], ph[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = amplitude * u(rng) / (k + 1);
    ph[k] = kPi * u(rng);
  }
  return HolderDensity::from_function(n, [&](double x) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += a[k] * std::sin(kTwoPi * (k + 1) * x + ph[k]);
    return std::exp(s);
  });
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("doubling map preserves Lebesgue") {
  const auto t = make_expanding_map(2, 0.0);
  const auto rho = transfer_apply(t, HolderDensity::constant(kDefaultDensityGrid));
  for (double v : rho.samples()) CHECK(v == 1.0);
}

TEST_CASE("doubling map halves frequencies") {
  const auto t = make_expanding_map(2, 0.0);
  const int n = kDefaultDensityGrid;
  const auto rho = HolderDensity::from_function(n, [](double x) { return 1.0 + 0.5 * std::cos(4 * kPi * x); });
  const auto out = transfer_apply(t, rho);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(out.samples()[i] - (1.0 + 0.5 * std::cos(2 * kPi * i / n))));
  CHECK(err < 1e-6);

  // a single mode at the lowest frequency is annihilated
  const TransferOperator op(t);
  std::vector<double> c(n);
  for (int i = 0; i < n; ++i) c[i] = std::cos(kTwoPi * i / n);
  for (double v : op.apply(c)) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("mass conservation and positivity") {
  const auto t = make_expanding_map(3, 0.08, "sin4pi");
  const TransferOperator op(t);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = random_density(rng, op.grid_size(), 1.5);
    const auto raw = op.apply(rho.samples());
    CHECK(std::abs(grid_integral(raw) - grid_integral(rho.samples())) <= 1e-10);
    for (double v : raw) REQUIRE(v > 0.0);
    CHECK(std::abs(op.apply(rho).raw_integral() - 1.0) < 1e-8);
  }
}

TEST_CASE("cone constants") {
  auto c = cone_constants(0.5, 1.0);
  CHECK(c.K0 == doctest::Approx(2.0));
  CHECK(c.n0 == 1);
  CHECK(c.tau == doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(c.tau == doctest::Approx(0.06767).epsilon(1e-4));
  CHECK(c.theta == doctest::Approx(0.93233).epsilon(1e-5));
  CHECK(c.h(2.0) == doctest::Approx(1.5));

  c = cone_constants(0.5, 0.0);
  CHECK(c.K0 == 0.0);
  CHECK(c.tau == 0.5);

  // n0 is the least n with 2 l^n <= l / (1 - l)
  c = cone_constants(0.9, 0.1);
  CHECK(2 * std::pow(0.9, c.n0) <= 9.0);
  CHECK(c.n0 == 1);
  c = cone_constants(0.3, 0.1);
  CHECK(2 * std::pow(0.3, c.n0) <= 0.3 / 0.7);
  CHECK(2 * std::pow(0.3, c.n0 - 1) > 0.3 / 0.7);
}

TEST_CASE("log-Hoelder constant estimator") {
  CHECK(holder_log_constant(HolderDensity::constant(1024), 1.0) == 0.0);
  const auto rho = HolderDensity::from_function(kDefaultDensityGrid, [](double x) { return std::exp(std::sin(kTwoPi * x)); });
  CHECK(holder_log_constant(rho, 1.0) == doctest::Approx(kTwoPi).epsilon(0.02));
  CHECK(holder_log_profile(rho, 1.0).size() == 10);
}

TEST_CASE("cone contraction on random densities") {
  const auto t = make_expanding_map(2, 0.1);
  const TransferOperator op(t);
  const double la = std::pow(t.lambda(), t.alpha());
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rho = random_density(rng, op.grid_size(), 2.0);
    const double k = holder_log_constant(rho, 1.0);
    const double k_out = holder_log_constant(op.apply(rho), 1.0);
    CHECK(k_out <= (k + t.distortion()) * la * 1.05);
  }
}

TEST_CASE("cone lower bound and coupling split") {
  const auto t = make_expanding_map(2, 0.1);
  const auto c = cone_constants(t);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto rho = random_density(rng, 2048, 3.0);
    const double k = holder_log_constant(rho, 1.0);
    if (k > c.K0) continue;
    CHECK(rho.min() >= std::exp(-c.K0) * (1 - 1e-6));
    const auto rest = coupling_residual(rho, c.tau);
    CHECK(rest.min() > 0.0);
    CHECK(holder_log_constant(rest, 1.0) <= 2 * c.K0);
    CHECK(std::abs(rest.raw_integral() - 1.0) < 1e-12);
  }
}

TEST_CASE("invariant density") {
  const auto d = invariant_density(make_expanding_map(2, 0.0), 1e-12);
  CHECK(d.residual <= 1e-12);
  for (double v : d.density.samples()) CHECK(std::abs(v - 1.0) <= 1e-12);

  const auto t = make_expanding_map(2, 0.1);
  const TransferOperator op(t);
  const auto p = invariant_density(op, 1e-11);
  CHECK(p.residual <= 1e-11);
  CHECK(p.density.min() > 0.0);
  CHECK(grid_integral(p.density.samples()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.regularity_ok);
  CHECK(p.log_holder <= cone_constants(t).K0 / 2 * 1.1);
  CHECK(max_abs_diff(op.apply(p.density).samples(), p.density.samples()) <= 1e-11);
}

TEST_CASE("expanding decay: Fourier and constant cases") {
  const auto t = make_expanding_map(2, 0.0);
  auto cosx = [](double x) { return std::cos(kTwoPi * x); };
  const auto c = expanding_decay(t, cosx, cosx, 10);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t n = 1; n < c.size(); ++n) CHECK(std::abs(c[n]) <= 1e-12);

  auto one = [](double) { return 1.0; };
  const auto p = make_expanding_map(2, 0.1);
  for (double v : expanding_decay(p, one, one, 5)) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("expanding decay agrees with orbit averages") {
  const auto t = make_expanding_map(2, 0.1);
  const TransferOperator op(t);
  const auto inv = invariant_density(op, 1e-12);
  auto f = [](double x) { return std::sqrt(std::abs(std::sin(kPi * x))); };
  auto g = [](double x) { return std::cos(kTwoPi * x); };
  const auto c = expanding_decay(op, inv.density, f, g, 3);
  // oracle: direct quadrature of f o T^n g against rho0 on a fine grid
  const int m = 1 << 20;
  double ef = 0, eg = 0, efg[4] = {0, 0, 0, 0};
  for (int i = 0; i < m; ++i) {
    const double x = (i + 0.5) / m;
    const double w = inv.density(x) / m;
    ef += f(x) * w;
    eg += g(x) * w;
    double y = x;
    for (int n = 0; n < 4; ++n) {
      efg[n] += f(y) * g(x) * w;
      y = t(y);
    }
  }
  for (int n = 0; n < 4; ++n) CHECK(c[n] == doctest::Approx(efg[n] - ef * eg).epsilon(1e-3).scale(1e-5));
}

TEST_CASE("non-positive split is rejected") {
  const auto rho = HolderDensity::constant(64);
  try {
    coupling_residual(HolderDensity::from_function(64, [](double x) { return x < 0.5 ? 0.1 : 1.9; }), 0.2);
    FAIL("expected NonPositiveWeight");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveWeight);
  }
  CHECK(coupling_residual(rho, 0.5).min() == doctest::Approx(1.0));
}
