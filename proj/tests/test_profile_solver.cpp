#include "doctest.h"
#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/field_io.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/norms.hpp"
#include "selfsim/profile.hpp"
#include "selfsim/profile_solver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"

using namespace selfsim;

namespace {
VectorField random_band_limited(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  VectorField v(g);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) v[c][i] = nd(rng);
  return dealiased(apply_semigroup(v, {0.0, 0.05}));
}

ProfileSolverOptions quick_options(double tol) {
  ProfileSolverOptions o;
  o.tolerance = tol;
  o.intermediate_tolerance = tol;
  o.coarse_q = 0;
  o.fine_q = 8;
  return o;
}
}  // namespace

TEST_CASE("swirl heat factor solves the radial heat equation") {
  // H'' + 4 H'/r + r H'/2 + H = 0, H(0) = 1/6, H ~ 1/r^2 at infinity
  const double d = 1e-3;
  for (double r : {0.3, 1.0, 2.5, 6.0, 11.0}) {
    const double hm = swirl_heat_factor(r - d);
    const double h0 = swirl_heat_factor(r);
    const double hp = swirl_heat_factor(r + d);
    const double h1 = (hp - hm) / (2 * d);
    const double h2 = (hp - 2 * h0 + hm) / (d * d);
    CHECK(std::abs(h2 + 4 * h1 / r + r * h1 / 2 + h0) < 1e-6);
  }
  CHECK(swirl_heat_factor(0.0) == doctest::Approx(1.0 / 6.0));
  CHECK(swirl_heat_factor(0.0499999) == doctest::Approx(swirl_heat_factor(0.0500001)).epsilon(1e-9));
  CHECK(swirl_heat_factor(40.0) * 1600.0 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("background window is flat on the inner half box") {
  CHECK(background_window({8.0, 8.0, 8.0}, 16.0) > 1.0 - 2e-7);
  CHECK(background_window({0.0, 0.0, 16.0}, 16.0) < 1e-4);
}

TEST_CASE("swirl background satisfies the linear profile identity inside") {
  GridSpec g(64, 16.0);
  HomogeneousData d;
  const VectorField v = background_profile(d, g, 1.0);
  const double res = profile_residual(v, 1.0, ModelKind::toy1, false);
  MESSAGE("linear residual of the background " << res);
  CHECK(res < 5e-6);
  CHECK(l2_norm(v - background_profile(d, g, 64.0)) == 0.0);
}

TEST_CASE("background of a non-swirl family is the semigroup at time one") {
  GridSpec g(32, 16.0);
  HomogeneousData d;
  d.family = DataFamily::sphere_profile;
  d.window_inner = 2.0;
  d.sphere_samples = SphereTable::tabulate(17, 32, [](const Vec3& n) { return Vec3{-n[1], n[0], 0.2 * n[2]}; });
  const VectorField v = background_profile(d, g, 2.0);
  const VectorField ref = apply_semigroup(build_field(d, g), {2.0, 1.0});
  CHECK(l2_norm(v - ref) == 0.0);
}

TEST_CASE("two-mode nonlinearity matches the hand computation") {
  GridSpec g(32, std::numbers::pi);
  const double a = 2.0, b = 3.0;
  const VectorField w = VectorField::from_function(g, [=](const Vec3& x) {
    return Vec3{std::sin(a * x[1]), std::cos(b * x[0]), 0.0};
  });
  const VectorField t1 = VectorField::from_function(g, [=](const Vec3& x) {
    return Vec3{a * std::cos(b * x[0]) * std::cos(a * x[1]), -b * std::sin(a * x[1]) * std::sin(b * x[0]), 0.0};
  });
  const VectorField grad = VectorField::from_function(g, [=](const Vec3& x) {
    return Vec3{-0.5 * b * std::sin(2 * b * x[0]), 0.5 * a * std::sin(2 * a * x[1]), 0.0};
  });
  CHECK(max_norm(nonlinearity(w, ModelKind::toy1) - t1) < 1e-12);
  CHECK(max_norm(nonlinearity(w, ModelKind::toy2) - (t1 + grad)) < 1e-12);
  CHECK(max_norm(assemble_nonlinearity(w, VectorField(g), ModelKind::toy1) + t1) < 1e-12);
}

TEST_CASE("models agree up to a gradient on divergence-free fields") {
  GridSpec g(32, 8.0);
  const VectorField u = dealiased(leray_project(random_band_limited(g, 7)));
  const VectorField p1 = leray_project(nonlinearity(u, ModelKind::toy1));
  const VectorField p2 = leray_project(nonlinearity(u, ModelKind::toy2));
  CHECK(l2_norm(p1 - p2) <= 1e-8 * l2_norm(p1));
}

TEST_CASE("nonlinearity assembly splits into background and correction") {
  GridSpec g(16, 8.0);
  const VectorField w = random_band_limited(g, 8);
  const VectorField v = random_band_limited(g, 9);
  for (auto m : {ModelKind::toy1, ModelKind::toy2}) {
    const VectorField whole = assemble_nonlinearity(w, v, m);
    const VectorField parts = -1.0 * (bilinear(w, w, m) + bilinear(v, w, m) + bilinear(w, v, m) + bilinear(v, v, m));
    CHECK(l2_norm(whole - parts) <= 1e-12 * l2_norm(whole));
  }
  CHECK_THROWS_AS(assemble_nonlinearity(w, VectorField(GridSpec(8, 8.0)), ModelKind::toy1), ConfigurationError);
}

TEST_CASE("K at zero is quadratic in mu") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  const VectorField v1 = background_profile(d, g, 1.0);
  const auto q = DuhamelQuadrature::make(8);
  const VectorField zero(g);
  const VectorField k1 = K_map(zero, v1, 1.0, 1.0, ModelKind::toy1, q);
  const VectorField kh = K_map(zero, v1, 0.3, 1.0, ModelKind::toy1, q);
  CHECK(l2_norm(kh - 0.09 * k1) <= 1e-12 * l2_norm(kh));
  CHECK(max_norm(K_map(zero, v1, 0.0, 1.0, ModelKind::toy1, q)) == 0.0);
  CHECK_THROWS_AS(K_map(zero, v1, 1.5, 1.0, ModelKind::toy1, q), DomainError);
  CHECK_THROWS_AS(K_map(zero, v1, -0.1, 1.0, ModelKind::toy1, q), DomainError);
}

TEST_CASE("uniform schedule") {
  const auto s = uniform_schedule(0.1);
  REQUIRE(s.size() == 10);
  CHECK(s.front() == doctest::Approx(0.1));
  CHECK(s.back() == 1.0);
  CHECK(uniform_schedule(0.3).size() == 4);
  CHECK_THROWS_AS(uniform_schedule(0.0), ConfigurationError);
}

TEST_CASE("zero data gives the zero profile at once") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  d.amplitude = 0.0;
  const auto sol = solve_profile(d, g, 1.0, ModelKind::toy1, uniform_schedule(), quick_options(1e-10));
  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(max_norm(sol.U) == 0.0);
  CHECK(sol.x_norm == 0.0);
}

TEST_CASE("converged profile satisfies its fixed-point certificate") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  const auto opt = quick_options(1e-10);
  const auto sol = solve_profile(d, g, 1.0, ModelKind::toy2, {0.5, 1.0}, opt);
  CHECK(sol.converged);
  CHECK(sol.history.size() == 2);
  CHECK(l2_norm(sol.U - (sol.V_mu + sol.W)) == 0.0);
  const VectorField k = K_map(sol.W, sol.V_mu, 1.0, 1.0, ModelKind::toy2, DuhamelQuadrature::make(8));
  CHECK(l2_norm(sol.W + k) <= 1e-9 * l2_norm(sol.W));
  CHECK(std::isfinite(sol.x_norm));
  CHECK(sol.x_norm > 0.0);
}

TEST_CASE("amplitude and continuation parameter are interchangeable") {
  GridSpec g(16, 8.0);
  HomogeneousData unit;
  unit.amplitude = 1.0;
  HomogeneousData half;
  half.amplitude = 0.5;
  const auto opt = quick_options(1e-13);
  const auto a = solve_profile(unit, g, 2.0, ModelKind::toy1, {0.25, 0.5}, opt);
  const auto b = solve_profile(half, g, 2.0, ModelKind::toy1, {0.5, 1.0}, opt);
  CHECK(a.mu == 0.5);
  CHECK(l2_norm(a.U - b.U) <= 1e-10 * l2_norm(b.U));
}

TEST_CASE("invalid schedules and options are rejected") {
  GridSpec g(16, 8.0);
  const VectorField v(g);
  CHECK_THROWS_AS(solve_profile(v, 1.0, ModelKind::toy1, {}), ConfigurationError);
  CHECK_THROWS_AS(solve_profile(v, 1.0, ModelKind::toy1, {0.5, 0.4}), ConfigurationError);
  CHECK_THROWS_AS(solve_profile(v, 1.0, ModelKind::toy1, {1.2}), ConfigurationError);
  CHECK_THROWS_AS(solve_profile(v, -1.0, ModelKind::toy1, {1.0}), DomainError);
}

TEST_CASE("exhausted iteration budget ends in a nonconvergence error") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  d.amplitude = 0.5;
  auto opt = quick_options(1e-14);
  opt.max_iterations = 1;
  opt.min_step = 0.2;
  try {
    solve_profile(d, g, 1.0, ModelKind::toy1, {1.0}, opt);
    FAIL("expected an exception");
  } catch (const NonconvergenceError& e) {
    CHECK(e.last_good_mu() == 0.0);
  }
}

TEST_CASE("profile dumps round trip") {
  GridSpec g(16, 8.0);
  HomogeneousData d;
  const auto sol = solve_profile(d, g, 1.0, ModelKind::toy1, {1.0}, quick_options(1e-8));
  const auto dir = std::filesystem::temp_directory_path() / "selfsim_profile_dump";
  std::filesystem::remove_all(dir);
  save_profile(sol, dir);
  CHECK(l2_norm(load_vector_field(dir / "U.bin") - sol.U) == 0.0);
  std::ifstream in(dir / "profile.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["model"] == "toy1");
  CHECK(j["iterations"].get<int>() == sol.iterations);
  CHECK(j["fields"]["W"] == sha256_file(dir / "W.bin"));
  std::filesystem::remove_all(dir);
}
