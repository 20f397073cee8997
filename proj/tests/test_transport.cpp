#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fol/error.hpp"
#include "fol/transport.hpp"

using namespace fol;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, int n, int dim = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts;
  std::vector<double> ws;
  for (int i = 0; i < n; ++i) {
    pts.push_back({u(rng), dim == 2 ? u(rng) : 0.0});
    ws.push_back(0.05 + u(rng));
  }
  DiscreteMeasure mu;
  mu.dim = dim;
  mu.points = pts;
  mu.weights = ws;
  return normalized(mu);
}

double exact_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& spec) {
  return exact_plan(a, b, cost_matrix(a, b, spec)).cost;
}

void check_certificate(const TransportPlan& plan, const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const CostMatrix& c) {
  CHECK(marginal_violation(plan, a, b) <= 1e-8);
  CHECK(std::abs(plan.duality_gap) <= 1e-9);
  for (const auto& e : plan.entries) CHECK(e.mass >= 0.0);
  double worst = -1e300;
  for (int i = 0; i < c.rows; ++i)
    for (int j = 0; j < c.cols; ++j) worst = std::max(worst, plan.phi[i] + plan.psi[j] - c(i, j));
  CHECK(worst <= 1e-9);
}

}  // namespace

TEST_CASE("ground costs") {
  const auto a = DiscreteMeasure::dirac({0.0, 0.0});
  const auto b = DiscreteMeasure::dirac({0.9, 0.0});
  CHECK(cost_matrix(a, b, CostSpec::distance())(0, 0) == doctest::Approx(0.1));
  CHECK(cost_matrix(a, b, CostSpec::distance_power(0.5))(0, 0) == doctest::Approx(0.31623).epsilon(1e-5));

  const Vec2 es = normalized({0.618034, -1.0});
  const auto field = DirectionField::constant(es);
  const auto spec = CostSpec::stable(field, 1.0, 0.01);
  CHECK(cost_matrix(a, b, spec)(0, 0) == doctest::Approx(default_penalty(2, 1.0)));
  const auto on_leaf = DiscreteMeasure::dirac(wrap01(0.2 * es));
  CHECK(cost_matrix(a, on_leaf, spec)(0, 0) == doctest::Approx(0.2));
  CHECK(default_penalty(2, 0.5) > std::pow(diameter(2), 0.5));
}

TEST_CASE("exact plan on forced and identical instances") {
  const auto a = DiscreteMeasure::dirac({0.0, 0.0});
  const auto b = DiscreteMeasure::dirac({0.5, 0.0});
  const auto p = exact_plan(a, b, cost_matrix(a, b, CostSpec::distance()));
  CHECK(p.cost == doctest::Approx(0.5));
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].mass == doctest::Approx(1.0));

  std::mt19937_64 rng(1);
  const auto mu = random_measure(rng, 30);
  const auto c = cost_matrix(mu, mu, CostSpec::distance());
  const auto q = exact_plan(mu, mu, c);
  CHECK(q.cost <= 1e-15);
  for (const auto& e : q.entries) CHECK(e.source == e.target);
  check_certificate(q, mu, mu, c);
}

TEST_CASE("exact plan certificates on random instances") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(1, 60);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = random_measure(rng, size(rng));
    const auto b = random_measure(rng, size(rng));
    const auto spec = trial % 2 ? CostSpec::distance() : CostSpec::distance_power(0.5);
    const auto c = cost_matrix(a, b, spec);
    const auto p = exact_plan(a, b, c);
    check_certificate(p, a, b, c);
  }
}

TEST_CASE("exact plan matches brute force on 6-point instances") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Vec2> xs, ys;
    for (int i = 0; i < 6; ++i) {
      xs.push_back({u(rng), u(rng)});
      ys.push_back({u(rng), u(rng)});
    }
    const auto a = DiscreteMeasure::torus(xs, std::vector<double>(6, 1.0 / 6));
    const auto b = DiscreteMeasure::torus(ys, std::vector<double>(6, 1.0 / 6));
    const auto c = cost_matrix(a, b, CostSpec::distance());
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double s = 0.0;
      for (int i = 0; i < 6; ++i) s += c(i, perm[i]) / 6;
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(exact_plan(a, b, c).cost == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("size cap") {
  std::mt19937_64 rng(4);
  const auto a = random_measure(rng, kExactSizeCap + 1);
  const auto b = random_measure(rng, 2);
  CostMatrix c;
  c.rows = kExactSizeCap + 1;
  c.cols = 2;
  c.data.assign(static_cast<std::size_t>(c.rows) * 2, 0.0);
  try {
    exact_plan(a, b, c);
    FAIL("expected ScaleExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ScaleExceeded);
  }
}

TEST_CASE("metric sanity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_measure(rng, 15);
    const auto y = random_measure(rng, 12);
    const auto z = random_measure(rng, 18);
    for (const auto& spec : {CostSpec::distance(), CostSpec::distance_power(0.4)}) {
      const double xy = exact_cost(x, y, spec), yx = exact_cost(y, x, spec);
      CHECK(exact_cost(x, x, spec) <= 1e-12);
      CHECK(std::abs(xy - yx) <= 1e-12);
      CHECK(exact_cost(x, z, spec) <= xy + exact_cost(y, z, spec) + 2e-12);
    }
    // D^beta <= diam^(beta - beta') D^beta' for beta < beta'
    const double b1 = exact_cost(x, y, CostSpec::distance_power(0.3));
    const double b2 = exact_cost(x, y, CostSpec::distance_power(0.8));
    CHECK(b2 <= std::pow(diameter(2), 0.8 - 0.3) * b1 + 1e-12);
  }
}

TEST_CASE("sinkhorn") {
  const auto a = DiscreteMeasure::dirac({0.1, 0.2});
  const auto b = DiscreteMeasure::dirac({0.3, 0.7});
  const auto cab = cost_matrix(a, b, CostSpec::distance());
  CHECK(sinkhorn_plan(a, b, cab, {0.5, 1e-9}).cost == doctest::Approx(cab(0, 0)));

  const auto u = DiscreteMeasure::uniform_grid(6);
  const auto cu = cost_matrix(u, u, CostSpec::distance());
  CHECK(sinkhorn_plan(u, u, cu, {1e-3, 1e-4}).cost <= 1e-7);

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto x = random_measure(rng, 50);
    const auto y = random_measure(rng, 50);
    const auto c = cost_matrix(x, y, CostSpec::distance());
    const auto s = sinkhorn_plan(x, y, c, {1e-3, 1e-4});
    const double exact = exact_plan(x, y, c).cost;
    CHECK(marginal_violation(s, x, y) <= 1e-8);
    CHECK(std::abs(s.cost - exact) <= 0.01 * exact);
    CHECK(s.cost >= exact - 1e-12);
  }
}

TEST_CASE("circle W1") {
  const auto da = DiscreteMeasure::circle({0.1}, {1.0});
  const auto db = DiscreteMeasure::circle({0.85}, {1.0});
  CHECK(circle_w1(da, db) == doctest::Approx(0.25));

  const auto grid = DiscreteMeasure::uniform_grid(1000, 1);
  const auto zero = DiscreteMeasure::circle({0.0}, {1.0});
  CHECK(std::abs(circle_w1(grid, zero) - 0.25) <= 1e-3);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_measure(rng, 100, 1);
    const auto y = random_measure(rng, 100, 1);
    CHECK(std::abs(circle_w1(x, y) - exact_cost(x, y, CostSpec::distance())) <= 1e-8);
  }
}
