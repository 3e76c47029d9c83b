#include "selfsim/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"

namespace selfsim {

namespace {
constexpr Region kInner = Region::inner_half_box;

double sq(double x) { return x * x; }

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}
}  // namespace

ScalarField gradient_magnitude(const VectorField& f) {
  const Jacobian jac = jacobian(f);
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int c = 0; c < 3; ++c) s += sq(jac[j][c][i]);
    out[i] = std::sqrt(s);
  }
  return out;
}

BoundReport uniform_bounds_report(const ProfileSolution& sol, const VectorField& u0) {
  if (!sol.converged) throw DomainError("uniform_bounds_report: profile did not converge");
  require_same_grid(sol.U.grid(), u0.grid());
  BoundReport rep;
  rep.kappa = sol.kappa;
  const double a = weak_lorentz_norm(u0, 3.0);
  rep.u0_weak_l3 = a;

  const ScalarField div_u = divergence(sol.U);
  const double div_u2 = sq(l2_norm(div_u, kInner));
  const double div_w_grad2 = sq(l2_norm(gradient(divergence(sol.W)), kInner));
  const double k = sol.kappa;

  rep.lhs["energy"] = sq(l2_norm(sol.W, kInner)) + sq(gradient_l2(sol.W, kInner)) + k * div_u2;
  rep.lhs["penalty"] = k * k * div_u2;
  rep.lhs["hessian"] = sq(hessian_l2(sol.W, kInner)) + k * k * div_w_grad2;

  const double s1 = a * a + std::pow(a, 4);
  rep.rhs_scale["energy"] = s1;
  rep.rhs_scale["penalty"] = s1 * s1;
  rep.rhs_scale["hessian"] = s1 * s1;
  for (const auto& [name, v] : rep.lhs) rep.ratio[name] = safe_ratio(v, rep.rhs_scale[name]);
  return rep;
}

LorentzMargins lorentz_split_check(const ScalarField& g, double N, double r, double s, double t) {
  if (!(1.0 < t && t < r && r < s)) throw DomainError("lorentz_split_check: need 1 < t < r < s");
  if (!(N > 0.0)) throw DomainError("lorentz_split_check: N must be positive");
  const double dv = g.grid().cell_volume();
  double low = 0.0, high = 0.0;
  for (double v : g.values()) {
    const double m = std::abs(v);
    if (m <= N)
      low += std::pow(m, s);
    else
      high += std::pow(m, t);
  }
  LorentzMargins out;
  out.lower_lhs = low * dv;
  out.upper_lhs = high * dv;
  const double ar = std::pow(weak_lorentz_norm(g, r), r);
  const double lead = s / (s - r) * std::pow(N, s - r) * ar;
  const double tail = std::pow(N, s) * distribution_function(g, N);
  out.lower_rhs = lead - tail;
  out.upper_rhs = r / (r - t) * std::pow(N, t - r) * ar;
  out.lower_margin = out.lower_rhs - out.lower_lhs;
  out.upper_margin = out.upper_rhs - out.upper_lhs;
  out.scale = std::max({lead, tail, out.lower_lhs, out.upper_lhs, out.upper_rhs});
  const double floor = -1e-10 * out.scale;
  out.passed = out.lower_margin >= floor && out.upper_margin >= floor;
  return out;
}

double cut_level(double c, double t, double weak_l3) {
  if (!(c > 0.0 && t > 0.0 && weak_l3 > 0.0)) throw DomainError("cut_level: c, t and the norm must be positive");
  return 1.0 / std::sqrt(2.0 * c * t * weak_l3 * weak_l3);
}

double truncated_energy_bound(double c, double t, double weak_l3, double N) {
  const double a = weak_l3;
  return c / N * (a + a * a * a) * std::exp(c * N * N * t * a * a) + c * N * t * a * a * a;
}

DecayReport decay_report(const ProfileSolution& sol, double r_min, double r_max) {
  if (!sol.converged) throw DomainError("decay_report: profile did not converge");
  return {shell_decay_fit(sol.W, r_min, r_max), shell_decay_fit(gradient_magnitude(sol.W), r_min, r_max)};
}

}  // namespace selfsim
