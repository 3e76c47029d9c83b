#include "doctest.h"
#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/initial_data.hpp"
#include "selfsim/norms.hpp"

#include <cmath>

using namespace selfsim;

namespace {
double norm3(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// max relative deviation of 2 u(2x) from u(x) over grid points with
// lo < |x| and |2x| < hi; 2x is a grid point when x is.
double homogeneity_defect(const VectorField& u, double lo, double hi) {
  const GridSpec& g = u.grid();
  const int n = g.n();
  double worst = 0.0, scale = 0.0;
  for_each_point(g, [&](int i, int j, int l, std::size_t idx, const Vec3& x) {
    const double r = norm3(x);
    if (r <= lo || 2 * r >= hi) return;
    const int i2 = 2 * i - n / 2, j2 = 2 * j - n / 2, l2 = 2 * l - n / 2;
    if (i2 < 0 || j2 < 0 || l2 < 0 || i2 >= n || j2 >= n || l2 >= n) return;
    const std::size_t idx2 = g.index(i2, j2, l2);
    for (int c = 0; c < 3; ++c) {
      worst = std::max(worst, std::abs(2 * u[c][idx2] - u[c][idx]));
      scale = std::max(scale, std::abs(u[c][idx]));
    }
  });
  return worst / scale;
}
}  // namespace

TEST_CASE("swirl data is divergence free and homogeneous") {
  GridSpec g(64, 16.0);
  HomogeneousData d;
  d.amplitude = 0.5;
  const VectorField raw = build_field_unprojected(d, g);
  const VectorField u = build_field(d, g);
  CHECK(l2_norm(divergence(u)) <= 1e-10 * gradient_l2(u));
  CHECK(homogeneity_defect(raw, d.window_inner, 12.0) <= 1e-8);
  MESSAGE("homogeneity after projection: " << homogeneity_defect(u, d.window_inner, 12.0));
  MESSAGE("projection change: " << l2_norm(u - raw) / l2_norm(raw));
  CHECK(l2_norm(u - raw) <= 0.02 * l2_norm(raw));
}

TEST_CASE("zero amplitude gives the zero field") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  d.amplitude = 0.0;
  d.window_inner = 2.0;
  CHECK(max_norm(build_field(d, g)) == 0.0);
}

TEST_CASE("weak L3 norm is linear in the amplitude") {
  GridSpec g(32, 16.0);
  HomogeneousData d;
  d.amplitude = 0.25;
  d.window_inner = 2.0;
  const double a = weak_lorentz_norm(build_field(d, g), 3.0);
  d.amplitude = 1.0;
  const double b = weak_lorentz_norm(build_field(d, g), 3.0);
  CHECK(b / a == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("mollification bounds 1/|x| by 1/rho and leaves the exterior alone") {
  GridSpec g(32, 8.0);
  const VectorField f = VectorField::from_function(g, [](const Vec3& x) {
    const double r = norm3(x);
    return Vec3{r > 0 ? 1.0 / r : 0.0, 0.0, 0.0};
  });
  const double rho = 1.5;
  const VectorField m = mollify_origin(f, rho);
  CHECK(max_norm(m) <= (1.0 / rho) * (1 + 1e-6));
  bool exterior_same = true;
  for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
    if (norm3(x) >= rho && m[0][idx] != f[0][idx]) exterior_same = false;
  });
  CHECK(exterior_same);
}

TEST_CASE("mollification of constant and zero fields") {
  GridSpec g(16, 4.0);
  const VectorField c = VectorField::from_function(g, [](const Vec3&) { return Vec3{1.0, -2.0, 0.5}; });
  CHECK(max_norm(mollify_origin(c, 1.0, 0.0) - c) < 1e-14);
  const VectorField z(g);
  CHECK(max_norm(mollify_origin(z, 1.0)) == 0.0);
  CHECK_THROWS_AS(mollify_origin(z, 0.1), DomainError);
}

TEST_CASE("sphere-profile family reproduces the swirl from a table") {
  GridSpec g(32, 16.0);
  HomogeneousData d;
  d.family = DataFamily::sphere_profile;
  d.window_inner = 2.0;
  d.sphere_samples = SphereTable::tabulate(65, 128, [](const Vec3& e) { return Vec3{-e[1], e[0], 0.0}; });
  d.amplitude = 0.5;
  HomogeneousData s;
  s.window_inner = 2.0;
  s.amplitude = 0.5;
  const VectorField a = build_field_unprojected(d, g);
  const VectorField b = build_field_unprojected(s, g);
  // the swirl uses (-x2, x1, 0)/|x|^2 = (-e2, e1, 0) sin(theta)... / |x|, tabulated profile is linear
  CHECK(l2_norm(a - b) <= 1e-2 * l2_norm(b));
}

TEST_CASE("invalid windows are rejected") {
  GridSpec g(32, 16.0);
  HomogeneousData d;
  d.window_inner = 0.5;
  CHECK_THROWS_AS(build_field(d, g), DomainError);
  d.window_inner = 2.0;
  d.window_outer = 20.0;
  CHECK_THROWS_AS(build_field(d, g), ConfigurationError);
}
