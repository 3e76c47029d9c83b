#include "doctest.h"
#include "selfsim/error.hpp"
#include "selfsim/norms.hpp"

#include <cmath>
#include <numbers>

using namespace selfsim;

namespace {
const double pi = std::numbers::pi;
double r_of(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
}  // namespace

TEST_CASE("Lp norms of a Gaussian match closed forms") {
  GridSpec g(64, 12.0);
  const ScalarField f = ScalarField::from_function(g, [](const Vec3& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 4.0);
  });
  // int exp(-p r^2/4) = (4 pi / p)^{3/2}
  for (double p : {2.0, 3.0, 4.0, 6.0}) {
    const double exact = std::pow(std::pow(4 * pi / p, 1.5), 1.0 / p);
    CHECK(lp_norm(f, p) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(l2_norm(f) == doctest::Approx(std::pow(2 * pi, 0.75)).epsilon(1e-10));
  const VectorField v(f, ScalarField(g), ScalarField(g));
  // |grad f|^2 = r^2/4 f^2, integral = (3/4) * (2 pi)^{3/2} / 2 ... computed: int r^2/4 e^{-r^2/2} = (3/4)(2pi)^{3/2}
  CHECK(gradient_l2(v) == doctest::Approx(std::sqrt(0.75 * std::pow(2 * pi, 1.5))).epsilon(1e-8));
}

TEST_CASE("weak L3 by rearrangement agrees with the level-set definition") {
  GridSpec g(32, 8.0);
  const ScalarField f = ScalarField::from_function(g, [](const Vec3& x) {
    return 1.0 / (0.3 + r_of(x)) + 0.2 * std::sin(x[0]);
  });
  const double a = weak_lorentz_norm(f, 3.0);
  const double b = weak_lorentz_norm_levels(f, 3.0, 4000);
  CHECK(b <= a * (1 + 1e-12));
  CHECK(b == doctest::Approx(a).epsilon(5e-3));
}

TEST_CASE("distribution function counts cells") {
  GridSpec g(8, 1.0);
  ScalarField f(g);
  f[0] = 2.0;
  f[5] = -3.0;
  CHECK(distribution_function(f, 1.0) == doctest::Approx(2 * g.cell_volume()));
  CHECK(distribution_function(f, 2.5) == doctest::Approx(g.cell_volume()));
}

TEST_CASE("shell fit recovers algebraic decay") {
  GridSpec g(64, 256.0);
  const ScalarField f = ScalarField::from_function(g, [](const Vec3& x) {
    return std::pow(1.0 + r_of(x), -3.0);
  });
  const DecayFit fit = shell_decay_fit(f, 64.0, 128.0);
  CHECK(fit.shells >= 3);
  CHECK(fit.exponent == doctest::Approx(-3.0).epsilon(0.1 / 3.0));
  CHECK(fit.confidence > 0.99);
  CHECK_FALSE(fit.super_algebraic);
}

TEST_CASE("shell fit flags Gaussian decay") {
  GridSpec g(64, 32.0);
  const ScalarField f = ScalarField::from_function(g, [](const Vec3& x) {
    const double r = r_of(x);
    return std::exp(-r * r / 4.0);
  });
  const DecayFit fit = shell_decay_fit(f, 8.0, 16.0);
  CHECK(fit.super_algebraic);
}

TEST_CASE("shell fit rejects short ranges") {
  GridSpec g(32, 16.0);
  const ScalarField f(g);
  CHECK_THROWS_AS(shell_decay_fit(f, 1.0, 8.0), InsufficientRangeError);
  CHECK_THROWS_AS(shell_decay_fit(f, 4.0, 4.5), InsufficientRangeError);
}
