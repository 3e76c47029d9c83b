#include "selfsim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/field_io.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/norms.hpp"

namespace selfsim {

namespace {

double bump(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

double bump_derivative(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  return bump(z) * (-2.0 * z / (q * q));
}

struct BumpFields {
  ScalarField psi;
  VectorField grad;
  ScalarField lap;
};

BumpFields make_bump_fields(const GridSpec& g, const TestBump& b) {
  ScalarField psi = ScalarField::from_function(g, [&b](const Vec3& x) {
    const double dx = x[0] - b.centre[0], dy = x[1] - b.centre[1], dz = x[2] - b.centre[2];
    return bump(std::sqrt(dx * dx + dy * dy + dz * dz) / b.radius);
  });
  return {psi, gradient(psi), laplacian(psi)};
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

// Linear interpolation of a step series at time t.
double at_time(const std::vector<double>& t, const std::vector<double>& f, double x) {
  if (x <= t.front()) return f.front();
  if (x >= t.back()) return f.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t i = std::size_t(it - t.begin());
  const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * f[i - 1] + w * f[i];
}

struct Rates {
  double energy = 0.0;
  double grad = 0.0;
  double div = 0.0;
  double flux = 0.0;
};

// Instantaneous integrands for the energy bookkeeping of w and the local
// energy inequality of u = v + w.
Rates step_rates(const VectorField& v, const VectorField& w, double kappa, ModelKind model,
                 const std::vector<BumpFields>& bumps, std::vector<BumpSeries>& out) {
  const GridSpec& g = w.grid();
  const double dv = g.cell_volume();
  const Jacobian jw = jacobian(w);
  Rates r;
  double e = 0.0, gsum = 0.0, dsum = 0.0, f = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double divw = jw[0][0][p] + jw[1][1][p] + jw[2][2][p];
    double vv = 0.0, vw = 0.0, flux = 0.0;
    for (int i = 0; i < 3; ++i) {
      e += w[i][p] * w[i][p];
      vv += v[i][p] * v[i][p];
      vw += v[i][p] * w[i][p];
      for (int j = 0; j < 3; ++j) {
        gsum += jw[j][i][p] * jw[j][i][p];
        flux += (v[j][p] * v[i][p] + w[j][p] * v[i][p]) * jw[j][i][p];
      }
    }
    flux += model == ModelKind::toy1 ? 0.5 * vw * divw : (0.5 * vv + vw) * divw;
    dsum += divw * divw;
    f += flux;
  }
  r.energy = e * dv;
  r.grad = gsum * dv;
  r.div = kappa * dsum * dv;
  r.flux = f * dv;

  if (!bumps.empty()) {
    const VectorField u = v + w;
    const Jacobian ju = jacobian(u);
    const double cm = model == ModelKind::toy1 ? 0.5 : 1.0;
    for (std::size_t b = 0; b < bumps.size(); ++b) {
      const BumpFields& bf = bumps[b];
      double a = 0.0, bb = 0.0, c = 0.0, d = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double divu = ju[0][0][p] + ju[1][1][p] + ju[2][2][p];
        double gu = 0.0, uu = 0.0, ugrad = 0.0;
        for (int i = 0; i < 3; ++i) {
          uu += u[i][p] * u[i][p];
          ugrad += u[i][p] * bf.grad[i][p];
          for (int j = 0; j < 3; ++j) gu += ju[j][i][p] * ju[j][i][p];
        }
        a += (gu + kappa * divu * divu) * bf.psi[p];
        bb += 0.5 * uu * bf.lap[p];
        c += (cm * uu - kappa * divu) * ugrad;
        d += 0.5 * uu * bf.psi[p];
      }
      out[b].a.push_back(a * dv);
      out[b].b.push_back(bb * dv);
      out[b].c.push_back(c * dv);
      out[b].d.push_back(d * dv);
    }
  }
  return r;
}

}  // namespace

double TestBump::time_factor(double t) const {
  return bump((2.0 * t - t_start - t_stop) / (t_stop - t_start));
}

double TestBump::time_derivative(double t) const {
  return bump_derivative((2.0 * t - t_start - t_stop) / (t_stop - t_start)) * 2.0 / (t_stop - t_start);
}

VectorField Trajectory::velocity(std::size_t i) const {
  if (i >= snapshots.size()) throw ConfigurationError("snapshot index out of range");
  if (times[i] == 0.0) return u0 + snapshots[i];
  return apply_semigroup(u0, {kappa, times[i]}) + snapshots[i];
}

Trajectory evolve(const VectorField& u0, double kappa, ModelKind model, const EvolveOptions& opt) {
  if (!(opt.t_end > 0.0) || !(opt.dt > 0.0) || !(opt.cfl_max > 0.0))
    throw ConfigurationError("t_end, dt and cfl_max must be positive");
  if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
  const GridSpec& g = u0.grid();
  const double h = g.spacing();
  for (const auto& b : opt.bumps) {
    if (b.radius < 8.0 * h) throw ConfigurationError("test bump is not resolved (radius below 8 h)");
    if (!(b.t_start > 0.0 && b.t_stop <= opt.t_end && b.t_start < b.t_stop))
      throw ConfigurationError("test bump time support must lie inside (0, t_end]");
  }

  Trajectory tr;
  tr.kappa = kappa;
  tr.model = model;
  tr.u0 = u0;
  tr.bumps = opt.bumps;
  tr.bump_series.resize(opt.bumps.size());
  std::vector<BumpFields> bumps;
  for (const auto& b : opt.bumps) bumps.push_back(make_bump_fields(g, b));

  std::vector<double> stops = opt.snapshot_times;
  stops.push_back(opt.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::remove_if(stops.begin(), stops.end(), [&](double s) { return s <= 0.0 || s > opt.t_end; }),
              stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  VectorField w(g);
  VectorField v = u0;
  double t = 0.0;
  double dt = opt.dt;
  Rates prev = step_rates(v, w, kappa, model, bumps, tr.bump_series);
  tr.step_times.push_back(0.0);
  tr.energy_series.push_back(prev.energy);
  tr.gradient_dissipation.push_back(0.0);
  tr.divergence_dissipation.push_back(0.0);
  tr.dissipation_series.push_back(0.0);
  tr.flux_series.push_back(0.0);
  tr.times.push_back(0.0);
  tr.snapshots.push_back(w);

  std::size_t next_stop = 0;
  while (next_stop < stops.size()) {
    const double umax = max_norm(v + w);
    if (dt * umax / h > opt.cfl_max) {
      dt /= 2.0;
      ++tr.rejected_steps;
      if (dt < 1e-12 * opt.t_end) throw NumericalError("time step collapsed under the CFL limit");
      continue;
    }
    const double target = stops[next_stop];
    const bool lands = t + dt >= target - 1e-9 * dt;
    const double step = lands ? target - t : dt;
    const double t_next = lands ? target : t + step;

    const VectorField v_next = apply_semigroup(u0, {kappa, t_next});
    const VectorField a = -1.0 * nonlinearity(v + w, model);
    const VectorField w_star = apply_semigroup(w + step * a, {kappa, step});
    const VectorField b = -1.0 * nonlinearity(v_next + w_star, model);
    VectorField w_next = apply_semigroup(w + (0.5 * step) * a, {kappa, step}) + (0.5 * step) * b;

    if (!(w_next[0].all_finite() && w_next[1].all_finite() && w_next[2].all_finite())) {
      if (!opt.diagnostic_dir.empty()) {
        std::filesystem::create_directories(opt.diagnostic_dir);
        save_field(w, opt.diagnostic_dir / "last_finite_w.bin");
      }
      std::ostringstream msg;
      msg << "non-finite state after t = " << t;
      throw NumericalError(msg.str());
    }

    w = std::move(w_next);
    v = v_next;
    const Rates cur = step_rates(v, w, kappa, model, bumps, tr.bump_series);
    const double dtr = t_next - t;
    tr.step_times.push_back(t_next);
    tr.energy_series.push_back(cur.energy);
    tr.gradient_dissipation.push_back(tr.gradient_dissipation.back() + 0.5 * dtr * (prev.grad + cur.grad));
    tr.divergence_dissipation.push_back(tr.divergence_dissipation.back() + 0.5 * dtr * (prev.div + cur.div));
    tr.dissipation_series.push_back(tr.gradient_dissipation.back() + tr.divergence_dissipation.back());
    tr.flux_series.push_back(tr.flux_series.back() + 0.5 * dtr * (prev.flux + cur.flux));
    prev = cur;
    t = t_next;
    if (lands) {
      tr.times.push_back(t);
      tr.snapshots.push_back(w);
      ++next_stop;
    }
  }
  return tr;
}

VectorField rescale_field(const VectorField& f, double m) {
  if (!(m > 0.0 && m <= 1.0)) throw DomainError("rescale factor must lie in (0, 1]");
  const GridSpec& g = f.grid();
  const int n = g.n();
  const double unit = g.wavenumber_unit();
  // M[i][j]: trigonometric interpolant through node j evaluated at m x_i
  std::vector<double> M(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = m * g.coordinate(i) - g.coordinate(j);
      double s = 1.0 + std::cos(unit * (n / 2) * d);
      for (int k = 1; k < n / 2; ++k) s += 2.0 * std::cos(unit * k * d);
      M[std::size_t(i) * n + j] = s / n;
    }
  VectorField out(g);
  std::vector<double> line(n), res(n);
  for (int c = 0; c < 3; ++c) {
    const auto src = f[c].values();
    std::vector<double> a(src.begin(), src.end());
    for (int axis = 0; axis < 3; ++axis) {
      const std::size_t stride = axis == 0 ? std::size_t(n) * n : (axis == 1 ? std::size_t(n) : 1);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          std::size_t base;
          if (axis == 0) base = std::size_t(p) * n + q;
          else if (axis == 1) base = std::size_t(p) * n * n + q;
          else base = (std::size_t(p) * n + q) * n;
          for (int i = 0; i < n; ++i) line[i] = a[base + i * stride];
          for (int i = 0; i < n; ++i) {
            double s = 0.0;
            const double* row = &M[std::size_t(i) * n];
            for (int j = 0; j < n; ++j) s += row[j] * line[j];
            res[i] = s;
          }
          for (int i = 0; i < n; ++i) a[base + i * stride] = res[i];
        }
    }
    std::copy(a.begin(), a.end(), out[c].values().begin());
  }
  return out;
}

double self_similarity_check(const Trajectory& traj, std::size_t i1, std::size_t i2) {
  if (i1 >= traj.times.size() || i2 >= traj.times.size()) throw ConfigurationError("snapshot index out of range");
  const double t1 = traj.times[i1], t2 = traj.times[i2];
  const double L = traj.u0.grid().half_width();
  if (!(t1 > 0.0 && t1 < t2)) throw DomainError("self-similarity check needs 0 < t1 < t2");
  if (t2 > (L / 4.0) * (L / 4.0)) throw DomainError("t2 is outside the window-free range");
  const double m = std::sqrt(t1 / t2);
  const VectorField later = traj.velocity(i2);
  const VectorField pred = m * rescale_field(traj.velocity(i1), m);
  return l2_norm(pred - later, Region::inner_quarter_box) / l2_norm(later, Region::inner_quarter_box);
}

MarginReport local_energy_check(const Trajectory& traj, std::size_t index, double tolerance) {
  if (index >= traj.bumps.size()) throw ConfigurationError("bump index out of range");
  const TestBump& b = traj.bumps[index];
  const BumpSeries& s = traj.bump_series[index];
  const auto& t = traj.step_times;
  std::vector<double> lhs(t.size()), heat(t.size()), flux(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double eta = b.time_factor(t[i]);
    lhs[i] = eta * s.a[i];
    heat[i] = b.time_derivative(t[i]) * s.d[i] + eta * s.b[i];
    flux[i] = eta * s.c[i];
  }
  MarginReport r;
  r.lhs = trapezoid(t, lhs);
  const double h = trapezoid(t, heat);
  const double f = trapezoid(t, flux);
  r.rhs = h + f;
  r.margin = r.rhs - r.lhs;
  r.scale = std::max({std::abs(r.lhs), std::abs(h), std::abs(f)});
  r.passed = r.margin >= -tolerance * r.scale;
  return r;
}

EnergyGrowthReport energy_growth_check(const Trajectory& traj, double t_min, double t_max,
                                       const std::vector<double>& pair_times, double tolerance) {
  const auto& t = traj.step_times;
  if (t.size() < 3 || !(t_min > 0.0) || t_max / t_min < 10.0 || t.back() < t_max * (1.0 - 1e-12))
    throw DomainError("trajectory must cover at least one decade of t");
  EnergyGrowthReport r;
  r.u0_weak_l3 = weak_lorentz_norm(traj.u0, 3.0);
  const double n2 = r.u0_weak_l3 * r.u0_weak_l3;
  bool all_zero = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min * (1.0 - 1e-12) || t[i] > t_max * (1.0 + 1e-12)) continue;
    const double v = traj.energy_series[i] + traj.dissipation_series[i];
    r.times.push_back(t[i]);
    r.lhs.push_back(v);
    if (v > 0.0) all_zero = false;
    if (n2 > 0.0) r.c0_candidate = std::max(r.c0_candidate, v / (std::sqrt(t[i]) * (n2 + n2 * n2)));
  }
  if (r.times.size() < 3) throw DomainError("too few steps inside the fit window");
  if (!all_zero) {
    const LogLogFit fit = loglog_fit(r.times, r.lhs);
    r.slope = fit.slope;
    r.confidence = fit.r2;
  }

  for (std::size_t a = 0; a < pair_times.size(); ++a)
    for (std::size_t b = a + 1; b < pair_times.size(); ++b) {
      const double s = pair_times[a], tt = pair_times[b];
      if (s >= tt || tt > t.back()) continue;
      const double es = 0.5 * at_time(t, traj.energy_series, s);
      const double et = 0.5 * at_time(t, traj.energy_series, tt);
      const double d = at_time(t, traj.dissipation_series, tt) - at_time(t, traj.dissipation_series, s);
      const double f = at_time(t, traj.flux_series, tt) - at_time(t, traj.flux_series, s);
      EnergyPair p;
      p.s = s;
      p.t = tt;
      p.report.lhs = et + d;
      p.report.rhs = es + f;
      p.report.margin = p.report.rhs - p.report.lhs;
      p.report.scale = std::max({et, es, std::abs(d), std::abs(f)});
      p.report.passed = p.report.margin >= -tolerance * p.report.scale;
      if (!p.report.passed) r.turbulent_ok = false;
      r.turbulent_pairs.push_back(p);
    }
  return r;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["kappa"] = traj.kappa;
  j["model"] = to_string(traj.model);
  j["n"] = traj.u0.grid().n();
  j["L"] = traj.u0.grid().half_width();
  j["rejected_steps"] = traj.rejected_steps;
  nlohmann::json snaps = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "w_%04zu.bin", i);
    snaps.push_back({{"t", traj.times[i]}, {"file", name}, {"sha256", save_field(traj.snapshots[i], dir / name)}});
  }
  j["snapshots"] = snaps;

  std::ostringstream csv;
  csv << "t,energy,dissipation,kappa_dissipation,flux\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.step_times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.step_times[i], traj.energy_series[i],
                  traj.gradient_dissipation[i], traj.divergence_dissipation[i], traj.flux_series[i]);
    csv << buf;
  }
  const std::string text = csv.str();
  std::ofstream(dir / "series.csv", std::ios::binary) << text;
  j["series"] = {{"file", "series.csv"},
                 {"sha256", sha256_hex({reinterpret_cast<const unsigned char*>(text.data()), text.size()})}};
  std::ofstream(dir / "manifest.json") << j.dump(2) << '\n';
}

}  // namespace selfsim
