#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tdeform/deformation.hpp"
#include "tdeform/integrator.hpp"
#include "tdeform/analysis.hpp"

using namespace tdeform;
using tdeform::testing::max_field_difference;
using tdeform::testing::random_points;

namespace {

const TParams kChaotic{2.0, 0.2, 30.0};

// Seed for the random quadratic spec corpus.
constexpr std::uint64_t kSpecSeed = 20180417;

}  // namespace

TEST_CASE("vanishing deformation functions leave the field unchanged") {
  const auto f = t_field(kChaotic);
  const auto [h, c] = hp_constants(kChaotic);
  const auto mu = ScalarField::coordinate(0);
  const DeformationSpec zero;
  const auto pts = random_points(1, 200, 5.0);

  CHECK(max_field_difference(deform_generic(f, mu, h, c, zero), f, pts) == 0.0);
  CHECK(max_field_difference(deform_t(kChaotic, zero), f, pts) < 1e-14);
  CHECK(max_field_difference(particular_field({kChaotic, 0.0}), f, pts) < 1e-14);
}

TEST_CASE("generic construction reproduces the alpha = g z example") {
  const auto [h, c] = hp_constants(kChaotic);
  const auto field = deform_generic(t_field(kChaotic), ScalarField::coordinate(0), h, c, linear_z_spec(0.9));
  CHECK(max_abs(field({1, 1, 1}) - State{-0.9, 26.0, 0.8}) < 1e-14);
}

TEST_CASE("deform_t with alpha = g z is particular_field") {
  for (double g : {-1.2, -0.3, 0.0, 0.9, 2.5}) {
    const auto pts = random_points(7, 200, 5.0);
    CHECK(max_field_difference(deform_t(kChaotic, linear_z_spec(g)), particular_field({kChaotic, g}),
                               pts) < 1e-12);
  }
}

TEST_CASE("deform_t agrees with the generic construction on random quadratic specs") {
  std::mt19937_64 rng(kSpecSeed);
  const auto [h, c] = hp_constants(kChaotic);
  const auto f = t_field(kChaotic);
  const auto mu = ScalarField::coordinate(0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto spec = random_quadratic_spec(rng);
    const auto pts = random_points(1000 + k, 100, 5.0);
    worst = std::max(worst, max_field_difference(deform_t(kChaotic, spec),
                                                 deform_generic(f, mu, h, c, spec), pts));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("deformed Hamilton-Poisson part keeps H + alpha and C + beta") {
  std::mt19937_64 rng(kSpecSeed + 1);
  const auto [h, c] = hp_constants(kChaotic);
  const auto g = hp_field(kChaotic);
  const auto mu = ScalarField::coordinate(0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto spec = random_quadratic_spec(rng);
    const auto deformed = deform_generic(g, mu, h, c, spec);
    const auto h_def = h + spec.alpha;
    const auto c_def = c + spec.beta;
    for (const auto& s : random_points(2000 + k, 100, 5.0)) {
      const State v = deformed(s);
      worst = std::max({worst, std::fabs(dot(h_def.gradient(s), v)), std::fabs(dot(c_def.gradient(s), v))});
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("deformed invariants survive high-accuracy integration") {
  // alpha and beta depend on (y, z) only and beta is small, so C + beta stays
  // coercive and orbits remain bounded over the window.
  const auto [h, c] = hp_constants(kChaotic);
  QuadraticPolynomial alpha;
  alpha.linear = {0.0, 0.3, -0.2};
  alpha.quadratic = {0.0, 0.0, 0.0, 0.1, 0.25, -0.15};
  QuadraticPolynomial beta;
  beta.linear = {0.0, 0.1, 0.2};
  beta.quadratic = {0.0, 0.0, 0.0, 0.1, -0.05, 0.1};
  const DeformationSpec spec{alpha.to_field(), beta.to_field()};

  const auto field = deform_generic(hp_field(kChaotic), ScalarField::coordinate(0), h, c, spec);
  const auto traj = integrate(field, {0.7, -0.4, 0.5}, IntegrationConfig::adaptive(0.0, 10.0, 1e-12, 1e-12));
  const auto drift = conservation_drift({h + spec.alpha, c + spec.beta}, traj);
  CHECK(drift[0] < 1e-8);
  CHECK(drift[1] < 1e-8);
}

TEST_CASE("particular_field") {
  const DeformedParams dp{kChaotic, 0.9};
  const auto f = particular_field(dp);

  SUBCASE("rounded equilibrium is nearly stationary") {
    CHECK(max_abs(f({1.16, 2.42, 14.0})) < 0.02);
  }
  SUBCASE("control term is -g x y in the first component") {
    const auto base = t_field(kChaotic);
    for (const auto& s : random_points(5, 200, 10.0)) {
      const State diff = f(s) - base(s);
      CHECK(diff.x == doctest::Approx(-0.9 * s.x * s.y).epsilon(1e-12));
      CHECK(diff.y == 0.0);
      CHECK(diff.z == 0.0);
    }
  }
  SUBCASE("exact Jacobian") {
    CHECK(f.jacobian({1, 2, 3}) == Matrix3{{-2 - 1.8, 2 - 0.9, 0, 28 - 6, 0, -2, 2, 1, -0.2}});
    for (const auto& s : random_points(6, 100, 10.0)) {
      const Matrix3 fd = tdeform::testing::central_jacobian([&](const State& q) { return f(q); }, s, 1e-4);
      CHECK(max_abs(f.jacobian(s) - fd) <= 1e-8);
    }
  }
  SUBCASE("rejects a = 0") {
    CHECK_THROWS_AS(particular_field({{0.0, 0.2, 30.0}, 0.9}), std::invalid_argument);
  }
}

TEST_CASE("quadratic polynomial gradient matches central differences") {
  std::mt19937_64 rng(kSpecSeed + 2);
  for (int k = 0; k < 20; ++k) {
    const auto p = QuadraticPolynomial::random(rng);
    for (const auto& s : random_points(300 + k, 20, 5.0)) {
      const State fd = tdeform::testing::central_gradient([&](const State& q) { return p.value(q); }, s, 1e-4);
      CHECK(max_abs(p.gradient(s) - fd) < 1e-8);
    }
  }
}
