#include "doctest.h"
#include "selfsim/error.hpp"
#include "selfsim/estimates.hpp"
#include "selfsim/profile_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace selfsim;

namespace {
double r2_of(const Vec3& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

ProfileSolution fake_solution(const VectorField& w, double kappa) {
  ProfileSolution s;
  s.kappa = kappa;
  s.W = w;
  s.V_mu = VectorField(w.grid());
  s.U = w;
  s.mu = 1.0;
  s.converged = true;
  return s;
}
}  // namespace

TEST_CASE("bound quantities of a Gaussian match their closed forms") {
  // W = e1 g, g = exp(-|x|^2/4); every integral is a Gaussian moment of exp(-|x|^2/2).
  GridSpec g(64, 16.0);
  const VectorField w = VectorField::from_function(g, [](const Vec3& x) {
    return Vec3{std::exp(-r2_of(x) / 4.0), 0.0, 0.0};
  });
  const double kappa = 2.0;
  const double z = std::pow(2.0 * std::numbers::pi, 1.5);
  const BoundReport rep = uniform_bounds_report(fake_solution(w, kappa), w);
  CHECK(rep.lhs.at("energy") == doctest::Approx((1.0 + 0.75 + kappa * 0.25) * z).epsilon(1e-9));
  CHECK(rep.lhs.at("penalty") == doctest::Approx(kappa * kappa * 0.25 * z).epsilon(1e-9));
  CHECK(rep.lhs.at("hessian") == doctest::Approx((15.0 / 16.0 + kappa * kappa * 5.0 / 16.0) * z).epsilon(1e-9));
  const double a = rep.u0_weak_l3;
  CHECK(a > 0.0);
  CHECK(rep.rhs_scale.at("energy") == doctest::Approx(a * a + std::pow(a, 4)));
  CHECK(rep.rhs_scale.at("penalty") == doctest::Approx(std::pow(a * a + std::pow(a, 4), 2)));
  for (const auto& [name, v] : rep.ratio) CHECK(v == doctest::Approx(rep.lhs.at(name) / rep.rhs_scale.at(name)));
}

TEST_CASE("zero profile gives zero bounds and unconverged profiles are refused") {
  GridSpec g(16, 8.0);
  ProfileSolution s = fake_solution(VectorField(g), 4.0);
  const BoundReport rep = uniform_bounds_report(s, VectorField(g));
  for (const auto& [name, v] : rep.lhs) {
    CHECK(v == 0.0);
    CHECK(rep.ratio.at(name) == 0.0);
  }
  s.converged = false;
  CHECK_THROWS_AS(uniform_bounds_report(s, VectorField(g)), DomainError);
  CHECK_THROWS_AS(decay_report(s), DomainError);
}

TEST_CASE("Lorentz split of a constant above its level") {
  GridSpec g(16, 8.0);
  const ScalarField c(g, 0.7);
  const LorentzMargins m = lorentz_split_check(c, 1.0, 3.0, 4.0, 2.0);
  CHECK(m.upper_lhs == 0.0);
  CHECK(m.upper_margin == doctest::Approx(m.upper_rhs));
  CHECK(m.upper_rhs > 0.0);
  CHECK(m.passed);
}

TEST_CASE("Lorentz split of a windowed inverse distance holds at every level") {
  GridSpec g(32, 8.0);
  const ScalarField f = ScalarField::from_function(g, [](const Vec3& x) {
    const double r = std::sqrt(r2_of(x));
    return std::exp(-r2_of(x) / 16.0) / std::max(r, 0.25);
  });
  for (double N : {0.5, 1.0, 2.0}) {
    const LorentzMargins m = lorentz_split_check(f, N, 3.0, 4.0, 2.0);
    // direct sums over the cells as an independent oracle for the left sides
    double low = 0.0, high = 0.0;
    for (double v : f.values()) (std::abs(v) <= N ? low += std::pow(std::abs(v), 4) : high += v * v);
    CHECK(m.lower_lhs == doctest::Approx(low * g.cell_volume()));
    CHECK(m.upper_lhs == doctest::Approx(high * g.cell_volume()));
    CHECK(m.lower_margin >= 0.0);
    CHECK(m.upper_margin >= 0.0);
    CHECK(m.passed);
  }
  CHECK_THROWS_AS(lorentz_split_check(f, 1.0, 2.0, 4.0, 3.0), DomainError);
  CHECK_THROWS_AS(lorentz_split_check(f, 0.0, 3.0, 4.0, 2.0), DomainError);
}

TEST_CASE("Lorentz split is sharp for a single plateau") {
  // g = c on k cells: A^r = c^r k dv, so at N = c the lower bound is s/(s-r) times the lhs.
  GridSpec g(16, 8.0);
  ScalarField f(g);
  for (int i = 0; i < 10; ++i) f[i * 7] = 1.5;
  const double r = 3.0, s = 5.0;
  const LorentzMargins m = lorentz_split_check(f, 1.5, r, s, 2.0);
  CHECK(m.lower_rhs == doctest::Approx(s / (s - r) * m.lower_lhs).epsilon(1e-12));
}

TEST_CASE("cut level turns the truncated bound into a square-root envelope") {
  const double c = 0.8, a = 1.3;
  const double expected = c * std::sqrt(2.0 * c) * std::exp(0.5) * (a * a + std::pow(a, 4)) + std::sqrt(c / 2.0) * a * a;
  for (double t : {0.01, 0.3, 1.0, 25.0}) {
    const double b = truncated_energy_bound(c, t, a, cut_level(c, t, a));
    CHECK(b / std::sqrt(t) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cut_level(c, 0.0, a), DomainError);
}

TEST_CASE("decay report on a field with known algebraic tails") {
  // f = (4 (1 - exp(-r^2/4)) / r^2)^(3/2) ~ 8 r^-3 up to exp(-r^2/4). Unlike (1 + r^2)^(-3/2)
  // it has no poles near the real axis, so its spectrum is resolved at h = 1/2.
  GridSpec g(64, 16.0);
  const VectorField w = VectorField::from_function(g, [](const Vec3& x) {
    const double s = r2_of(x) / 4.0;
    const double core = s < 1e-12 ? 1.0 : -std::expm1(-s) / s;
    return Vec3{std::pow(core, 1.5) * background_window(x, 16.0), 0.0, 0.0};
  });
  const DecayReport rep = decay_report(fake_solution(w, 1.0));
  MESSAGE("exponents " << rep.value.exponent << " " << rep.gradient.exponent);
  CHECK(rep.value.exponent == doctest::Approx(-3.0).epsilon(0.1 / 3.0));
  CHECK(rep.gradient.exponent == doctest::Approx(-4.0).epsilon(0.15 / 4.0));
  CHECK_THROWS_AS(decay_report(fake_solution(w, 1.0), 1.0, 1.5), InsufficientRangeError);
}
