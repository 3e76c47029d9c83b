#include "selfsim/kappa_limit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/evolution.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

namespace {
constexpr Region kInner = Region::inner_half_box;

double sq(double x) { return x * x; }

VectorField advection(const VectorField& u) {
  const VectorField a = dealiased(u);
  const Jacobian jac = jacobian(a);
  VectorField out(u.grid());
  for (int i = 0; i < 3; ++i)
    for (std::size_t p = 0; p < out.size(); ++p)
      out[i][p] = a[0][p] * jac[0][i][p] + a[1][p] * jac[1][i][p] + a[2][p] * jac[2][i][p];
  return dealiased(out);
}

ScalarField mean_free(ScalarField p) {
  double mean = 0.0;
  for (double v : p.values()) mean += v;
  mean /= static_cast<double>(p.size());
  for (double& v : p.values()) v -= mean;
  return p;
}

bool strictly_decreasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

KappaSweepReport sweep(const std::function<VectorField(double)>& background, const std::vector<double>& kappas,
                       ModelKind model, const ProfileSolverOptions& opt) {
  if (kappas.empty()) throw ConfigurationError("kappa_sweep: empty ladder");
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (kappas[i] < 0.0) throw DomainError("kappa_sweep: kappa must be nonnegative");
    if (i > 0 && !(kappas[i] > kappas[i - 1])) throw ConfigurationError("kappa_sweep: ladder must increase");
  }
  KappaSweepReport rep;
  rep.model = model;
  for (double kappa : kappas) {
    const VectorField v1 = background(kappa);
    ProfileSolution sol;
    try {
      if (rep.solutions.empty()) throw NonconvergenceError("cold start", 0.0);
      sol = solve_profile(v1, kappa, model, {1.0}, opt, &rep.solutions.back().W);
    } catch (const NonconvergenceError&) {
      try {
        sol = solve_profile(v1, kappa, model, uniform_schedule(), opt);
      } catch (const NonconvergenceError& e) {
        rep.complete = false;
        rep.failed_kappa = kappa;
        rep.failure = e.what();
        break;
      }
    }
    rep.kappas.push_back(kappa);
    rep.pressures.push_back(recover_pressure(sol));
    rep.ns_residuals.push_back(rep.pressures.back().residual);
    rep.div_norms.push_back(l2_norm(divergence(sol.U), kInner));
    if (!rep.solutions.empty()) {
      const VectorField d = sol.W - rep.solutions.back().W;
      rep.cauchy_l2.push_back(l2_norm(d, kInner));
      rep.cauchy_h1.push_back(gradient_l2(d, kInner));
      rep.pressure_cauchy.push_back(l2_norm(rep.pressures.back().P - rep.pressures[rep.pressures.size() - 2].P, kInner));
    }
    rep.solutions.push_back(std::move(sol));
  }
  return rep;
}

// Order p with (ka^-p - kb^-p) / (kb^-p - kc^-p) = ratio, by bisection; the left side increases with p.
double fit_order(double ka, double kb, double kc, double ratio) {
  auto f = [&](double p) {
    return (std::pow(ka, -p) - std::pow(kb, -p)) / (std::pow(kb, -p) - std::pow(kc, -p)) - ratio;
  };
  double lo = 1e-3, hi = 20.0;
  if (f(lo) > 0.0 || f(hi) < 0.0) return std::nan("");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

double ns_profile_residual(const VectorField& u, const ScalarField& p, bool with_nonlinearity) {
  require_same_grid(u.grid(), p.grid());
  VectorField r = profile_linear(u, 0.0);
  if (with_nonlinearity) r += advection(u);
  r += gradient(p);
  return (l2_norm(r, kInner) + l2_norm(divergence(u), kInner)) / (h1_norm(u) + 1.0);
}

PressureCandidate recover_pressure(const ProfileSolution& sol) {
  const ScalarField base = mean_free(sol.kappa * divergence(sol.W));
  const double minus = ns_profile_residual(sol.U, -1.0 * base);
  const double plus = ns_profile_residual(sol.U, base);
  PressureCandidate c;
  c.sign = plus < minus ? 1 : -1;
  c.P = static_cast<double>(c.sign) * base;
  c.residual = std::min(plus, minus);
  c.other_residual = std::max(plus, minus);
  return c;
}

KappaSweepReport kappa_sweep(const HomogeneousData& data, const GridSpec& grid, const std::vector<double>& kappas,
                             ModelKind model, const ProfileSolverOptions& options) {
  return sweep([&](double k) { return background_profile(data, grid, k); }, kappas, model, options);
}

KappaSweepReport kappa_sweep(const VectorField& v1, const std::vector<double>& kappas, ModelKind model,
                             const ProfileSolverOptions& options) {
  return sweep([&](double) { return v1; }, kappas, model, options);
}

double rescaling_identity_error(const VectorField& u, const std::vector<double>& taus) {
  const GridSpec& g = u.grid();
  const double w2 = sq(g.half_width() / 4.0);
  const double dv = g.cell_volume();
  const Jacobian jac = jacobian(u);

  // sum |f(x)|^2 exp(-|s x|^2 / w2) dv over the grid
  auto weighted = [&](const VectorField& f, double s) {
    double acc = 0.0;
    for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
      const Vec3 v = f.at(idx);
      acc += (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * std::exp(-s * s * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / w2);
    });
    return acc * dv;
  };
  auto mismatch = [](double lhs, double rhs) {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : 1.0;
    return std::abs(lhs - rhs) / rhs;
  };

  double worst = 0.0;
  for (double tau : taus) {
    if (!(tau >= 1.0)) throw DomainError("rescaling_identity_error: tau must be >= 1");
    const double m = 1.0 / std::sqrt(tau);
    const double st = std::sqrt(tau);
    const double e_lhs = weighted(m * rescale_field(u, m), 1.0);
    const double e_rhs = st * weighted(u, st);
    double d_lhs = 0.0, d_rhs = 0.0;
    for (int j = 0; j < 3; ++j) {
      d_lhs += weighted((1.0 / tau) * rescale_field(jac[j], m), 1.0);
      d_rhs += weighted(jac[j], st) / st;
    }
    worst = std::max({worst, mismatch(e_lhs, e_rhs), mismatch(d_lhs, d_rhs)});
  }
  return worst;
}

ConvergenceSummary convergence_diagnostics(const KappaSweepReport& rep) {
  const std::size_t n = rep.solutions.size();
  if (n < 3) throw DomainError("convergence_diagnostics: need at least three ladder members");
  ConvergenceSummary s;
  const ProfileSolution& a = rep.solutions[n - 3];
  const ProfileSolution& b = rep.solutions[n - 2];
  const ProfileSolution& c = rep.solutions[n - 1];
  const double d1 = l2_norm(b.W - a.W, kInner);
  const double d2 = l2_norm(c.W - b.W, kInner);

  s.W = c.W;
  s.P = rep.pressures[n - 1].P;
  if (d1 > 0.0 && d2 > 0.0 && d1 > d2 && a.kappa > 0.0) {
    const double p = fit_order(a.kappa, b.kappa, c.kappa, d1 / d2);
    if (std::isfinite(p)) {
      s.order_defined = true;
      s.order = p;
      const double f = std::pow(c.kappa, -p) / (std::pow(b.kappa, -p) - std::pow(c.kappa, -p));
      s.W = c.W - f * (b.W - c.W);
      s.P = s.P - f * (rep.pressures[n - 2].P - s.P);
    }
  }
  s.U = c.V_mu + s.W;
  s.extrapolated_residual = ns_profile_residual(s.U, s.P);
  s.best_member_residual = *std::min_element(rep.ns_residuals.begin(), rep.ns_residuals.end());

  try {
    s.decay = shell_decay_fit(s.W, 4.0, 8.0);
    s.decay_fitted = true;
  } catch (const InsufficientRangeError&) {
    s.decay_fitted = false;
  }

  for (const ProfileSolution& m : rep.solutions) {
    const VectorField gap = m.U - s.U;
    s.energy_gaps.push_back(sq(l2_norm(gap, kInner)) + 2.0 * sq(gradient_l2(gap, kInner)));
    s.rescaling_error = std::max(s.rescaling_error, rescaling_identity_error(gap));
  }

  const bool positive = std::all_of(rep.div_norms.begin(), rep.div_norms.end(), [](double v) { return v > 0.0; });
  s.div_slope = positive ? loglog_fit(rep.kappas, rep.div_norms).slope : 0.0;
  s.cauchy_decreasing = strictly_decreasing(rep.cauchy_l2);
  s.h1_decreasing = strictly_decreasing(rep.cauchy_h1);
  s.pressure_decreasing = strictly_decreasing(rep.pressure_cauchy);
  s.sign_consistent = std::all_of(rep.pressures.begin(), rep.pressures.end(),
                                  [](const PressureCandidate& p) { return p.residual < p.other_residual; });
  return s;
}

}  // namespace selfsim
