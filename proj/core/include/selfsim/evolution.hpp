#pragma once

#include <filesystem>
#include <vector>

#include "selfsim/field.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

// phi(x, t) = eta(t) psi(x) with psi(x) = b(|x - centre| / radius) and
// eta(t) = b((2t - t_start - t_stop) / (t_stop - t_start)), b(z) = exp(1 - 1/(1 - z^2)).
struct TestBump {
  Vec3 centre{0.0, 0.0, 0.0};
  double radius = 4.0;
  double t_start = 0.1;
  double t_stop = 0.9;

  double time_factor(double t) const;
  double time_derivative(double t) const;
};

struct EvolveOptions {
  double t_end = 1.0;
  double dt = 2.5e-3;
  // dt max|u| / h above this rejects the step and halves dt
  double cfl_max = 0.5;
  // times at which w is stored; t = 0 and t_end are always included
  std::vector<double> snapshot_times;
  std::vector<TestBump> bumps;
  // where a snapshot is written if the state turns non-finite (empty: none)
  std::filesystem::path diagnostic_dir;
};

// Spatial integrals entering the local energy inequality, sampled every step:
// a = int (|grad u|^2 + kappa div(u)^2) psi, b = int |u|^2/2 lap psi,
// c = int (c_m |u|^2 - kappa div u) u.grad psi, d = int |u|^2/2 psi,
// with c_m = 1/2 for toy1 and 1 for toy2.
struct BumpSeries {
  std::vector<double> a, b, c, d;
};

struct Trajectory {
  double kappa = 0.0;
  ModelKind model = ModelKind::toy1;
  // snapshots of w = u - v
  std::vector<double> times;
  std::vector<VectorField> snapshots;
  VectorField u0;

  // per accepted step, starting at t = 0
  std::vector<double> step_times;
  std::vector<double> energy_series;              // ||w||^2
  std::vector<double> gradient_dissipation;       // cumulative int ||grad w||^2
  std::vector<double> divergence_dissipation;     // cumulative kappa int ||div w||^2
  std::vector<double> dissipation_series;         // sum of the two
  std::vector<double> flux_series;                // cumulative int of the turbulent-inequality flux
  std::vector<BumpSeries> bump_series;
  std::vector<TestBump> bumps;
  int rejected_steps = 0;

  // u = v + w at snapshot i
  VectorField velocity(std::size_t i) const;
};

Trajectory evolve(const VectorField& u0, double kappa, ModelKind model, const EvolveOptions& options = {});

// Relative L2 discrepancy on the inner quarter box between u(., t2) and
// m u(m x, t1), m = sqrt(t1/t2), for snapshot indices i1 < i2.
double self_similarity_check(const Trajectory& traj, std::size_t i1, std::size_t i2);

// Resamples f at (m x) by exact trigonometric interpolation along each axis
// (m <= 1 keeps the points inside the box).
VectorField rescale_field(const VectorField& f, double m);

struct MarginReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double scale = 0.0;   // largest term in magnitude
  bool passed = true;
};

// Local energy inequality for bump `index`, integrated over the run.
MarginReport local_energy_check(const Trajectory& traj, std::size_t index, double tolerance = 0.02);

struct EnergyPair {
  double s = 0.0;
  double t = 0.0;
  MarginReport report;
};

struct EnergyGrowthReport {
  double slope = 0.0;
  double confidence = 0.0;
  double c0_candidate = 0.0;
  double u0_weak_l3 = 0.0;
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<EnergyPair> turbulent_pairs;
  bool turbulent_ok = true;
};

// Fits log(||w||^2 + dissipation) against log t on [t_min, t_max] and checks
// the turbulent energy inequality on all pairs s < t of `pair_times`.
EnergyGrowthReport energy_growth_check(const Trajectory& traj, double t_min = 0.05, double t_max = 1.0,
                                       const std::vector<double>& pair_times = {0.0, 0.1, 0.25, 0.5, 0.75, 1.0},
                                       double tolerance = 0.02);

// Writes snapshot dumps, manifest.json and series.csv into `dir`.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir);

}  // namespace selfsim
