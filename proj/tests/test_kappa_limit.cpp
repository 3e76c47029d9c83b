#include "doctest.h"
#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/kappa_limit.hpp"
#include "selfsim/norms.hpp"

#include <cmath>
#include <numbers>

using namespace selfsim;

namespace {
double r2_of(const Vec3& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

VectorField gaussian_e1(const GridSpec& g, double width2) {
  return VectorField::from_function(g, [=](const Vec3& x) { return Vec3{std::exp(-r2_of(x) / width2), 0.0, 0.0}; });
}

ProfileSolverOptions quick_options() {
  ProfileSolverOptions o;
  o.tolerance = 1e-10;
  o.intermediate_tolerance = 1e-10;
  o.coarse_q = 0;
  o.fine_q = 8;
  return o;
}

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

// Ladder whose members are exactly W + kappa^-p F.
KappaSweepReport synthetic_ladder(const VectorField& w, const VectorField& f, double p) {
  KappaSweepReport rep;
  for (double k : {4.0, 16.0, 64.0}) {
    rep.kappas.push_back(k);
    rep.solutions.push_back(fake_solution(w + std::pow(k, -p) * f, k));
    rep.pressures.push_back({ScalarField(w.grid()), -1, 1.0, 2.0});
    rep.ns_residuals.push_back(1.0);
    rep.div_norms.push_back(1.0 / k);
  }
  return rep;
}
}  // namespace

TEST_CASE("Navier-Stokes profile residual on closed-form fields") {
  GridSpec g(64, 16.0);
  const double z = std::pow(2.0 * std::numbers::pi, 1.5);
  CHECK(ns_profile_residual(VectorField(g), ScalarField(g)) == 0.0);

  // pressure only: the residual is ||grad P|| with P = exp(-|x|^2/4)
  const ScalarField p = ScalarField::from_function(g, [](const Vec3& x) { return std::exp(-r2_of(x) / 4.0); });
  CHECK(ns_profile_residual(VectorField(g), p) == doctest::Approx(std::sqrt(0.75 * z)).epsilon(1e-9));

  // U = e1 g: the linear part leaves e1 g, advection adds -e1 x1 g^2 / 2, div U = -x1 g / 2
  const VectorField u = gaussian_e1(g, 4.0);
  const double h1 = std::sqrt(1.75 * z) + 1.0;
  const double div = std::sqrt(0.25 * z);
  const double full = std::sqrt(z + std::pow(std::numbers::pi, 1.5) / 8.0);
  CHECK(ns_profile_residual(u, ScalarField(g)) == doctest::Approx((full + div) / h1).epsilon(1e-7));
  CHECK(ns_profile_residual(u, ScalarField(g), false) == doctest::Approx((std::sqrt(z) + div) / h1).epsilon(1e-7));
}

TEST_CASE("pressure of a divergence-free profile vanishes") {
  GridSpec g(16, 8.0);
  const PressureCandidate c = recover_pressure(fake_solution(VectorField(g), 16.0));
  CHECK(max_norm(VectorField(c.P, c.P, c.P)) == 0.0);
}

TEST_CASE("penalty pressure carries the sign of minus kappa div U") {
  // An exact solution of the penalized system leaves only the toy1 term U div U / 2 and
  // div U in the Navier-Stokes residual when P = -kappa div U; the other sign adds 2 kappa grad div U.
  GridSpec g(16, 8.0);
  HomogeneousData d;
  d.amplitude = 2.0;
  const ProfileSolution sol = solve_profile(d, g, 4.0, ModelKind::toy1, uniform_schedule(0.25), quick_options());
  const PressureCandidate c = recover_pressure(sol);
  MESSAGE("residuals " << c.residual << " " << c.other_residual);
  CHECK(c.sign == -1);
  CHECK(c.residual < c.other_residual);
}

TEST_CASE("pressure scales quadratically with small data") {
  GridSpec g(16, 8.0);
  double ratio[2];
  int i = 0;
  for (double sigma : {1e-2, 1e-3}) {
    HomogeneousData d;
    d.amplitude = sigma;
    const ProfileSolution sol = solve_profile(d, g, 4.0, ModelKind::toy1, {1.0}, quick_options());
    const PressureCandidate c = recover_pressure(sol);
    ratio[i++] = l2_norm(c.P) / (sigma * sigma);
  }
  CHECK(ratio[0] > 0.0);
  CHECK(ratio[1] == doctest::Approx(ratio[0]).epsilon(0.02));
}

TEST_CASE("extrapolation recovers an exact power-law ladder") {
  GridSpec g(32, 8.0);
  const VectorField w = gaussian_e1(g, 4.0);
  const VectorField f = VectorField::from_function(g, [](const Vec3& x) {
    const double e = std::exp(-r2_of(x) / 3.0);
    return Vec3{0.0, x[0] * e, e};
  });
  const ConvergenceSummary s = convergence_diagnostics(synthetic_ladder(w, f, 1.0));
  REQUIRE(s.order_defined);
  CHECK(s.order == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(l2_norm(s.W - w) <= 1e-10 * l2_norm(w));
  CHECK(s.cauchy_decreasing == false);  // cauchy lists are not filled by the synthetic ladder
  CHECK(s.div_slope == doctest::Approx(-1.0));
  CHECK(s.sign_consistent);
  CHECK(s.energy_gaps.size() == 3);
  CHECK(s.energy_gaps[0] > s.energy_gaps[1]);
  CHECK(s.energy_gaps[1] > s.energy_gaps[2]);
}

TEST_CASE("identical members leave the order undefined") {
  GridSpec g(16, 8.0);
  const ConvergenceSummary s = convergence_diagnostics(synthetic_ladder(VectorField(g), VectorField(g), 1.0));
  CHECK_FALSE(s.order_defined);
  CHECK(s.rescaling_error == 0.0);
  KappaSweepReport two = synthetic_ladder(VectorField(g), VectorField(g), 1.0);
  two.solutions.pop_back();
  CHECK_THROWS_AS(convergence_diagnostics(two), DomainError);
}

TEST_CASE("self-similar rescaling identities hold for a resolved field") {
  GridSpec g(64, 16.0);
  const VectorField u = VectorField::from_function(g, [](const Vec3& x) {
    const double e = std::exp(-r2_of(x) / 16.0);
    return Vec3{-x[1] * e, x[0] * e, 0.5 * e};
  });
  const double err = rescaling_identity_error(u);
  MESSAGE("rescaling mismatch " << err);
  CHECK(err <= 1e-8);
  CHECK_THROWS_AS(rescaling_identity_error(u, {0.5}), DomainError);
}

TEST_CASE("sweep of zero data and of small swirl data") {
  GridSpec g(16, 8.0);
  HomogeneousData zero;
  zero.amplitude = 0.0;
  const KappaSweepReport z = kappa_sweep(zero, g, {1.0, 4.0, 16.0}, ModelKind::toy1, quick_options());
  CHECK(z.complete);
  for (double d : z.div_norms) CHECK(d == 0.0);
  for (double c : z.cauchy_l2) CHECK(c == 0.0);

  HomogeneousData small;
  small.amplitude = 0.5;
  const KappaSweepReport r = kappa_sweep(small, g, {1.0, 4.0, 16.0}, ModelKind::toy2, quick_options());
  REQUIRE(r.complete);
  CHECK(r.solutions.size() == 3);
  CHECK(r.cauchy_l2.size() == 2);
  for (const auto& s : r.solutions) CHECK(s.converged);

  CHECK_THROWS_AS(kappa_sweep(small, g, {4.0, 1.0}, ModelKind::toy1), ConfigurationError);
  CHECK_THROWS_AS(kappa_sweep(small, g, {}, ModelKind::toy1), ConfigurationError);
}

TEST_CASE("a failing member ends the sweep with a partial report") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  auto opt = quick_options();
  opt.tolerance = opt.intermediate_tolerance = 1e-15;
  opt.max_iterations = 1;
  opt.min_step = 0.3;
  const KappaSweepReport r = kappa_sweep(d, g, {1.0, 4.0}, ModelKind::toy1, opt);
  CHECK_FALSE(r.complete);
  CHECK(r.failed_kappa == 1.0);
  CHECK(r.solutions.empty());
  CHECK_FALSE(r.failure.empty());
}
