#include "doctest.h"
#include "selfsim/calculus.hpp"
#include "selfsim/duhamel.hpp"
#include "selfsim/error.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/norms.hpp"
#include "selfsim/profile.hpp"

#include <cmath>
#include <random>

using namespace selfsim;

namespace {
double r2_of(const Vec3& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

VectorField random_smooth(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  VectorField v(g);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) v[c][i] = nd(rng);
  return apply_semigroup(v, {0.0, 0.3});
}

// Forcing produced by W = e1 exp(-|x|^2/4), worked out by hand.
VectorField gaussian_forcing(const GridSpec& g, double kappa) {
  return VectorField::from_function(g, [kappa](const Vec3& x) {
    const double e = std::exp(-r2_of(x) / 4.0);
    return Vec3{e * (1.0 + kappa / 2.0 - kappa * x[0] * x[0] / 4.0), -kappa * x[0] * x[1] / 4.0 * e,
                -kappa * x[0] * x[2] / 4.0 * e};
  });
}

VectorField gaussian(const GridSpec& g) {
  return VectorField::from_function(g, [](const Vec3& x) { return Vec3{std::exp(-r2_of(x) / 4.0), 0.0, 0.0}; });
}
}  // namespace

TEST_CASE("psi kernels match their closed forms and are smooth at zero") {
  for (double z : {1e-8, 1e-3, 0.3, 0.49, 0.51, 2.0, 40.0}) {
    const double e = std::exp(-z);
    if (z > 0.1) {
      CHECK(duhamel_psi0(z) == doctest::Approx((z - 1.0 + e) / (z * z)).epsilon(1e-12));
      CHECK(duhamel_psi1(z) == doctest::Approx((1.0 - (1.0 + z) * e) / (z * z)).epsilon(1e-12));
    }
    CHECK(duhamel_psi0(z) + duhamel_psi1(z) == doctest::Approx(-std::expm1(-z) / z).epsilon(1e-12));
  }
  CHECK(duhamel_psi0(0.0) == doctest::Approx(0.5));
  CHECK(duhamel_psi1(0.0) == doctest::Approx(0.5));
}

TEST_CASE("quadrature construction") {
  const auto q = DuhamelQuadrature::make(8);
  CHECK(q.nodes.size() == 9);
  CHECK(q.nodes.front() == 0.0);
  CHECK(q.nodes.back() == 1.0);
  double sum = 0.0;
  for (double w : q.weights) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(DuhamelQuadrature::make(3), ConfigurationError);
  CHECK_THROWS_AS(DuhamelQuadrature::make(8, 3), ConfigurationError);
  CHECK(DuhamelQuadrature::for_grid(GridSpec(32, 8.0)).q == 32);
}

TEST_CASE("zero forcing gives zero") {
  GridSpec g(16, 8.0);
  CHECK(max_norm(duhamel_apply(VectorField(g), 1.0, DuhamelQuadrature::make(8))) == 0.0);
}

TEST_CASE("solution operator is linear") {
  GridSpec g(16, 8.0);
  const auto q = DuhamelQuadrature::make(8);
  const VectorField f = random_smooth(g, 1);
  const VectorField h = random_smooth(g, 2);
  const VectorField lhs = duhamel_apply(2.5 * f + h, 3.0, q);
  const VectorField rhs = 2.5 * duhamel_apply(f, 3.0, q) + duhamel_apply(h, 3.0, q);
  CHECK(l2_norm(lhs - rhs) <= 1e-12 * l2_norm(rhs));
}

TEST_CASE("divergence-free forcing stays divergence free") {
  GridSpec g(32, 8.0);
  const VectorField f = leray_project(random_smooth(g, 3));
  const VectorField w = duhamel_apply(f, 10.0, DuhamelQuadrature::make(8));
  CHECK(l2_norm(divergence(w)) <= 1e-10 * gradient_l2(w));
}

TEST_CASE("kappa only acts on the gradient channel") {
  GridSpec g(32, 8.0);
  const auto q = DuhamelQuadrature::make(8);
  const VectorField f = leray_project(random_smooth(g, 4));
  CHECK(l2_norm(duhamel_apply(f, 0.0, q) - duhamel_apply(f, 50.0, q)) <= 1e-12 * l2_norm(f));
}

TEST_CASE("manufactured Gaussian is recovered and the error falls under refinement") {
  const double kappa = 1.0;
  double err[2];
  int idx = 0;
  for (int n : {16, 32}) {
    GridSpec g(n, 16.0);
    const VectorField w = duhamel_apply(gaussian_forcing(g, kappa), kappa, DuhamelQuadrature::for_grid(g));
    const VectorField exact = gaussian(g);
    err[idx++] = l2_norm(w - exact) / l2_norm(exact);
  }
  MESSAGE("n=16 error " << err[0] << ", n=32 error " << err[1]);
  CHECK(err[1] < 1e-3);
  CHECK(err[1] * 2.0 <= err[0]);
}

TEST_CASE("hand-derived forcing agrees with the discrete profile operator") {
  GridSpec g(64, 16.0);
  const VectorField f = profile_linear(gaussian(g), 4.0);
  const VectorField exact = gaussian_forcing(g, 4.0);
  CHECK(l2_norm(f - exact) <= 1e-9 * l2_norm(exact));
}
