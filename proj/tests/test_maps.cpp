#include <cmath>
#include <random>

#include "doctest.h"
#include "fol/error.hpp"
#include "fol/maps.hpp"

using namespace fol;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("doubling map constants") {
  const auto t = make_expanding_map(2, 0.0);
  CHECK(t.lambda() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.distortion() == 0.0);
}

TEST_CASE("perturbed doubling constants match closed form") {
  const auto t = make_expanding_map(2, 0.1, "sin2pi");
  const double pi = std::numbers::pi;
  const double inf_d = 2.0 - 0.2 * pi;
  CHECK(t.lambda() == doctest::Approx(1.0 / inf_d).epsilon(1e-9));
  CHECK(t.lambda() == doctest::Approx(0.7290).epsilon(1e-4));
  // sup |T''| = 0.4 pi^2 is attained at x = 1/4, which lies on the grid
  CHECK(t.distortion() == doctest::Approx(0.4 * pi * pi / inf_d).epsilon(1e-9));
  CHECK(t.distortion() == doctest::Approx(2.878).epsilon(1e-3));
}

TEST_CASE("holder distortion for alpha below one") {
  const auto t = make_expanding_map(2, 0.1, "sin2pi", 0.5);
  CHECK(t.distortion() > 0.0);
  // the dyadic estimate at alpha = 1 is bounded by the analytic Lipschitz constant of log T'
  const auto lip = make_expanding_map(2, 0.1, "sin2pi", 0.999999);
  CHECK(lip.distortion() <= 0.4 * std::numbers::pi * std::numbers::pi / (2 - 0.2 * std::numbers::pi) * 1.001);
}

TEST_CASE("degenerate circle maps are rejected") {
  CHECK(kind_of([] { make_expanding_map(1, 0.0); }) == ErrorKind::NotExpanding);
  CHECK(kind_of([] { make_expanding_map(0, 0.0); }) == ErrorKind::InvalidDegree);
  CHECK(kind_of([] { make_expanding_map(2, 0.2); }) == ErrorKind::NotExpanding);
}

TEST_CASE("inverse branches of the doubling map") {
  const auto t = make_expanding_map(2, 0.0);
  auto b = inverse_branches(t, 0.5);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == doctest::Approx(0.25));
  CHECK(b[1] == doctest::Approx(0.75));
  b = inverse_branches(t, 0.0);
  CHECK(b[0] == doctest::Approx(0.0));
  CHECK(b[1] == doctest::Approx(0.5));

  const auto pairs = paired_branches(t, 0.5, 0.6);
  CHECK(pairs[0].first == doctest::Approx(0.25));
  CHECK(pairs[0].second == doctest::Approx(0.30));
  CHECK(pairs[1].first == doctest::Approx(0.75));
  CHECK(pairs[1].second == doctest::Approx(0.80));
  for (const auto& [x, y] : pairs) CHECK(circle_distance(x, y) == doctest::Approx(0.05));
}

TEST_CASE("branches invert the map and satisfy the pairing bound") {
  const auto t = make_expanding_map(3, 0.05, "sin4pi");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = u(rng), y = u(rng);
    const auto pairs = paired_branches(t, x, y);
    REQUIRE(pairs.size() == 3);
    for (const auto& [a, b] : pairs) {
      CHECK(circle_distance(t(a), x) <= 1e-10);
      CHECK(circle_distance(t(b), y) <= 1e-10);
      CHECK(circle_distance(a, b) <= t.lambda() * circle_distance(x, y) + 1e-12);
    }
  }
}

TEST_CASE("cat map eigen-data") {
  const auto t = make_toral_map(cat_matrix());
  CHECK(t.lambda_u() == doctest::Approx(2.618034).epsilon(1e-6));
  CHECK(t.lambda_s() == doctest::Approx(0.381966).epsilon(1e-6));
  CHECK(t.lambda_u() * t.lambda_s() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.e_u().y / t.e_u().x == doctest::Approx(0.618034).epsilon(1e-6));
  CHECK(t.e_s().y / t.e_s().x == doctest::Approx(-1.618034).epsilon(1e-6));
  CHECK(t.cones().strongly_preserved);
}

TEST_CASE("non-hyperbolic linear part is rejected") {
  CHECK(kind_of([] { make_toral_map({1, 1, 0, 1}); }) == ErrorKind::NotHyperbolic);
  CHECK(kind_of([] { make_toral_map({2, 0, 0, 1}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("large perturbation breaks the cone certificate") {
  CHECK(kind_of([] { make_toral_map(cat_matrix(), 0.5, "sin2pi_xy"); }) == ErrorKind::ConeViolation);
}

TEST_CASE("linear cat map direction fields") {
  const auto t = make_toral_map(cat_matrix());
  const auto f = direction_fields(t, 16, 40);
  for (const auto& v : f.unstable.samples()) CHECK(v.y / v.x == doctest::Approx(0.618034).epsilon(1e-6));
  for (const auto& v : f.stable.samples()) CHECK(v.y / v.x == doctest::Approx(-1.618034).epsilon(1e-6));
  CHECK(f.eta == doctest::Approx(t.lambda_s() / t.lambda_u()).epsilon(1e-3));
  CHECK(kind_of([&] { direction_fields(t, 16, 0); }) == ErrorKind::NoConvergence);
}

TEST_CASE("perturbed cat map") {
  const auto lin = make_toral_map(cat_matrix());
  ToralMapOptions opts;
  const auto t = make_toral_map(cat_matrix(), 0.01, "sin2pi_y", opts);
  CHECK(t.cones().strongly_preserved);
  CHECK(t.cones().centers.grid_size() == 1);

  // fields stay within 0.05 rad of the linear eigen-directions
  const int g = t.unstable_field().grid_size();
  double worst_u = 0.0, worst_s = 0.0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      worst_u = std::max(worst_u, line_angle(t.unstable_field().sample(i, j), lin.e_u()));
      worst_s = std::max(worst_s, line_angle(t.stable_field().sample(i, j), lin.e_s()));
    }
  }
  CHECK(worst_u < 0.05);
  CHECK(worst_s < 0.05);
  CHECK(worst_u > 0.0);

  // invariance: DT maps the computed unstable field to itself
  double drift = 0.0;
  for (int i = 0; i < g; i += 3) {
    for (int j = 0; j < g; j += 5) {
      const Vec2 p{double(i) / g, double(j) / g};
      const Vec2 image = t.differential(p) * t.unstable_field().at(p);
      drift = std::max(drift, line_angle(image, t.unstable_field().at(t(p))));
    }
  }
  CHECK(drift < 1e-3);

  // adapted-metric contraction of the stable field
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Vec2 p{double(i) / g, double(j) / g};
      CHECK(norm(t.differential(p) * t.stable_field().sample(i, j)) <= t.stable_contraction() + 1e-15);
    }
  }
  CHECK(t.stable_contraction() < 1.0);
  CHECK(t.lambda0() > 0.0);
  CHECK(t.lambda0() < t.stable_contraction());
  CHECK(t.eta() < 0.1459 + 0.05);
}

TEST_CASE("toral inverse and C0 distance") {
  const auto t = make_toral_map(cat_matrix(), 0.02, "sin2pi_y");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 p{u(rng), u(rng)};
    CHECK(torus_distance(t(t.inverse(p)), p) <= 1e-12);
  }
  const auto lin = make_toral_map(cat_matrix());
  CHECK(c0_distance(t, lin, 64) == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(c0_distance(lin, lin, 64) == 0.0);
}
