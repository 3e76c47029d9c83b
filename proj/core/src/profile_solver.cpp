#include "selfsim/profile_solver.hpp"

#include <gsl/gsl_sf_dawson.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "selfsim/calculus.hpp"
#include "selfsim/field_io.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/norms.hpp"

namespace selfsim {

namespace {

double dot(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto& x = a[c];
    const auto& y = b[c];
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  }
  return s;
}

double relative(double num, double den) {
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

// Solves min |f - sum_i gamma_i df_i| through the regularized normal equations.
std::vector<double> anderson_coefficients(const std::deque<VectorField>& df, const VectorField& f) {
  const int m = static_cast<int>(df.size());
  std::vector<double> a(m * m), b(m), gamma(m, 0.0);
  double trace = 0.0;
  for (int i = 0; i < m; ++i) {
    b[i] = dot(df[i], f);
    for (int j = 0; j <= i; ++j) a[i * m + j] = a[j * m + i] = dot(df[i], df[j]);
    trace += a[i * m + i];
  }
  if (trace == 0.0) return gamma;
  for (int i = 0; i < m; ++i) a[i * m + i] += 1e-12 * trace;
  // Cholesky
  for (int j = 0; j < m; ++j) {
    double d = a[j * m + j];
    for (int k = 0; k < j; ++k) d -= a[j * m + k] * a[j * m + k];
    if (d <= 0.0) return std::vector<double>(m, 0.0);
    a[j * m + j] = std::sqrt(d);
    for (int i = j + 1; i < m; ++i) {
      double s = a[i * m + j];
      for (int k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = s / a[j * m + j];
    }
  }
  for (int i = 0; i < m; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= a[i * m + k] * gamma[k];
    gamma[i] = s / a[i * m + i];
  }
  for (int i = m - 1; i >= 0; --i) {
    double s = gamma[i];
    for (int k = i + 1; k < m; ++k) s -= a[k * m + i] * gamma[k];
    gamma[i] = s / a[i * m + i];
  }
  return gamma;
}

struct StepResult {
  VectorField w;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Damped Picard iteration W <- W + theta (g(W) - W), g = -K(., mu), with
// Anderson mixing. theta halves on an increase and doubles after five
// consecutive decreases.
StepResult fixed_point(VectorField w, const VectorField& v1, double mu, double kappa, ModelKind model,
                       const DuhamelQuadrature& quad, double tol, const ProfileSolverOptions& opt) {
  StepResult out;
  std::deque<VectorField> dw, df;
  VectorField w_prev, f_prev;
  double theta = opt.initial_damping;
  double last = std::numeric_limits<double>::infinity();
  int rises = 0;
  int falls = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    VectorField f = K_map(w, v1, mu, kappa, model, quad);
    f *= -1.0;
    f = f - w;
    const double r = relative(std::sqrt(dot(f, f)), std::sqrt(dot(w, w)));
    out.iterations = it;
    out.residual = r;
    if (!std::isfinite(r) && it > 1) break;
    if (r <= tol) {
      out.converged = true;
      break;
    }
    if (r > last) {
      theta = std::max(theta / 2.0, 1.0 / 64.0);
      falls = 0;
      if (++rises >= opt.divergence_window) break;
    } else {
      rises = 0;
      if (++falls >= 5) {
        theta = std::min(2.0 * theta, 1.0);
        falls = 0;
      }
    }
    last = r;

    if (it > 1 && opt.anderson_depth > 0) {
      dw.push_back(w - w_prev);
      df.push_back(f - f_prev);
      if (static_cast<int>(df.size()) > opt.anderson_depth) {
        dw.pop_front();
        df.pop_front();
      }
    }
    w_prev = w;
    f_prev = f;
    const auto gamma = anderson_coefficients(df, f);
    VectorField next = w;
    VectorField fbar = f;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      next = next - gamma[i] * dw[i];
      fbar = fbar - gamma[i] * df[i];
    }
    w = next + theta * fbar;
  }
  out.w = std::move(w);
  return out;
}

void validate_schedule(const std::vector<double>& s) {
  if (s.empty()) throw ConfigurationError("continuation schedule is empty");
  double prev = 0.0;
  for (double mu : s) {
    if (!(mu > prev) || mu > 1.0)
      throw ConfigurationError("continuation schedule must increase within (0, 1]");
    prev = mu;
  }
}

}  // namespace

double swirl_heat_factor(double r) {
  if (r < 0.05) {
    const double r2 = r * r;
    return 1.0 / 6.0 - r2 / 60.0 + r2 * r2 / 840.0;
  }
  return (r - 2.0 * gsl_sf_dawson(r / 2.0)) / (r * r * r);
}

double background_window(const Vec3& x, double half_width) {
  const double centre = 0.77 * half_width;
  const double width = 0.07 * half_width;
  double w = 1.0;
  for (double xi : x) w *= 0.5 * std::erfc((std::abs(xi) - centre) / width);
  return w;
}

VectorField background_profile(const HomogeneousData& data, const GridSpec& grid, double kappa) {
  if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
  if (data.family != DataFamily::swirl) return apply_semigroup(build_field(data, grid), {kappa, 1.0});
  const double s = data.amplitude;
  const double L = grid.half_width();
  return VectorField::from_function(grid, [s, L](const Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double a = s * swirl_heat_factor(r) * background_window(x, L);
    return Vec3{-a * x[1], a * x[0], 0.0};
  });
}

VectorField assemble_nonlinearity(const VectorField& w, const VectorField& v_mu, ModelKind model) {
  require_same_grid(w.grid(), v_mu.grid());
  VectorField n = nonlinearity(v_mu + w, model);
  n *= -1.0;
  return n;
}

VectorField K_map(const VectorField& w, const VectorField& v1, double mu, double kappa,
                  ModelKind model, const DuhamelQuadrature& quad) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0, 1]");
  require_same_grid(w.grid(), v1.grid());
  return duhamel_apply(nonlinearity(mu * v1 + w, model), kappa, quad);
}

double x_norm(const VectorField& w) {
  const Jacobian jac = jacobian(w);
  double a = 0.0;
  double b = 0.0;
  for_each_point(w.grid(), [&](int, int, int, std::size_t idx, const Vec3& x) {
    const double r = 1.0 + std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    double v2 = 0.0;
    double g2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      v2 += w[c][idx] * w[c][idx];
      for (int j = 0; j < 3; ++j) g2 += jac[j][c][idx] * jac[j][c][idx];
    }
    a = std::max(a, r * r * std::sqrt(v2));
    b = std::max(b, r * r * r * std::sqrt(g2));
  });
  return a + b;
}

std::vector<double> uniform_schedule(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigurationError("schedule step must lie in (0, 1]");
  std::vector<double> s;
  const int count = static_cast<int>(std::ceil(1.0 / step - 1e-9));
  for (int i = 1; i < count; ++i) s.push_back(i * step);
  s.push_back(1.0);
  return s;
}

ProfileSolution solve_profile(const VectorField& v1, double kappa, ModelKind model,
                              const std::vector<double>& schedule, const ProfileSolverOptions& opt,
                              const VectorField* warm_start) {
  validate_schedule(schedule);
  if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
  if (opt.max_iterations < 1 || opt.anderson_depth < 0 || !(opt.tolerance > 0.0))
    throw ConfigurationError("invalid profile solver options");

  const GridSpec& g = v1.grid();
  const DuhamelQuadrature fine = opt.fine_q > 0 ? DuhamelQuadrature::make(opt.fine_q)
                                                : DuhamelQuadrature::for_grid(g);
  const bool two_stage = opt.coarse_q > 0 && opt.coarse_q != fine.q;
  const DuhamelQuadrature walk = two_stage ? DuhamelQuadrature::make(opt.coarse_q) : fine;

  ProfileSolution sol;
  sol.model = model;
  sol.kappa = kappa;
  VectorField w = warm_start ? *warm_start : VectorField(g);
  if (warm_start) require_same_grid(warm_start->grid(), g);

  const double final_mu = schedule.back();
  double mu_done = 0.0;
  StepResult last;
  for (double target : schedule) {
    double step = target - mu_done;
    while (mu_done < target) {
      const double mu = std::min(mu_done + step, target);
      const bool is_final = mu == final_mu && !two_stage;
      const double tol = is_final ? opt.tolerance : std::max(opt.tolerance, opt.intermediate_tolerance);
      StepResult r = fixed_point(w, v1, mu, kappa, model, walk, tol, opt);
      sol.history.push_back({mu, r.iterations, r.residual, r.converged});
      if (r.converged) {
        w = r.w;
        mu_done = mu;
        last = std::move(r);
        continue;
      }
      step /= 2.0;
      if (step < opt.min_step)
        throw NonconvergenceError("continuation stalled above mu = " + std::to_string(mu_done),
                                  mu_done);
    }
  }
  if (two_stage) {
    StepResult r = fixed_point(w, v1, final_mu, kappa, model, fine, opt.tolerance, opt);
    sol.history.push_back({final_mu, r.iterations, r.residual, r.converged});
    if (!r.converged)
      throw NonconvergenceError("refinement at mu = " + std::to_string(final_mu) + " did not converge",
                                final_mu);
    w = r.w;
    last = std::move(r);
  }

  sol.mu = final_mu;
  sol.W = std::move(w);
  sol.V_mu = final_mu * v1;
  sol.U = sol.V_mu + sol.W;
  sol.iterations = last.iterations;
  sol.fixed_point_residual = last.residual;
  sol.converged = true;
  sol.residual_l2 = profile_residual(sol.U, kappa, model);
  sol.x_norm = x_norm(sol.W);
  return sol;
}

ProfileSolution solve_profile(const HomogeneousData& data, const GridSpec& grid, double kappa,
                              ModelKind model, const std::vector<double>& schedule,
                              const ProfileSolverOptions& options) {
  return solve_profile(background_profile(data, grid, kappa), kappa, model, schedule, options);
}

void save_profile(const ProfileSolution& sol, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["model"] = to_string(sol.model);
  j["kappa"] = sol.kappa;
  j["mu"] = sol.mu;
  j["residual_l2"] = sol.residual_l2;
  j["fixed_point_residual"] = sol.fixed_point_residual;
  j["x_norm"] = sol.x_norm;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["n"] = sol.U.grid().n();
  j["L"] = sol.U.grid().half_width();
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : sol.history)
    hist.push_back({{"mu", h.mu}, {"iterations", h.iterations},
                    {"fixed_point_residual", h.fixed_point_residual}, {"converged", h.converged}});
  j["history"] = hist;
  j["fields"] = {{"W", save_field(sol.W, dir / "W.bin")},
                 {"V_mu", save_field(sol.V_mu, dir / "V_mu.bin")},
                 {"U", save_field(sol.U, dir / "U.bin")}};
  std::ofstream(dir / "profile.json") << j.dump(2) << '\n';
}

}  // namespace selfsim
