#pragma once

#include <string>
#include <vector>

#include "selfsim/field.hpp"
#include "selfsim/initial_data.hpp"
#include "selfsim/norms.hpp"
#include "selfsim/profile_solver.hpp"

namespace selfsim {

struct PressureCandidate {
  ScalarField P;
  int sign = -1;               // P = sign * kappa div W, shifted to mean zero
  double residual = 0.0;       // Navier-Stokes profile residual with this P
  double other_residual = 0.0; // same with the opposite sign
};

// Tries both signs of kappa div W and keeps the one with the smaller
// Navier-Stokes profile residual.
PressureCandidate recover_pressure(const ProfileSolution& sol);

// Momentum residual of -lap U + U.grad U - (x/2).grad U - U/2 + grad P on the
// inner half box plus ||div U|| there, divided by ||U||_{H^1} + 1.
double ns_profile_residual(const VectorField& u, const ScalarField& p, bool with_nonlinearity = true);

struct KappaSweepReport {
  ModelKind model = ModelKind::toy1;
  std::vector<double> kappas;
  std::vector<ProfileSolution> solutions;
  std::vector<PressureCandidate> pressures;
  std::vector<double> div_norms;       // ||div U|| on the inner half box
  std::vector<double> ns_residuals;    // per member, with its own pressure
  std::vector<double> cauchy_l2;       // ||W_k - W_{k+1}||, consecutive members
  std::vector<double> cauchy_h1;       // ||grad (W_k - W_{k+1})||
  std::vector<double> pressure_cauchy; // ||P_k - P_{k+1}||
  // set when a member failed; the report then holds the members before it
  bool complete = true;
  double failed_kappa = 0.0;
  std::string failure;
};

// Solves the profile problem along an increasing kappa ladder, each member
// warm-started from the previous one (falling back to a cold continuation).
KappaSweepReport kappa_sweep(const HomogeneousData& data, const GridSpec& grid, const std::vector<double>& kappas,
                             ModelKind model, const ProfileSolverOptions& options = {});
KappaSweepReport kappa_sweep(const VectorField& v1, const std::vector<double>& kappas, ModelKind model,
                             const ProfileSolverOptions& options = {});

struct ConvergenceSummary {
  bool order_defined = false;
  double order = 0.0;  // p in W_kappa = W + C kappa^-p, from the last three members
  VectorField W;       // extrapolated limit
  VectorField U;
  ScalarField P;
  double extrapolated_residual = 0.0;
  double best_member_residual = 0.0;
  bool decay_fitted = false;
  DecayFit decay;
  // sqrt(t) (||U_k - U||^2 + 2 ||grad (U_k - U)||^2) at t = 1, per member
  std::vector<double> energy_gaps;
  // worst relative mismatch of the weighted rescaling identities
  double rescaling_error = 0.0;
  double div_slope = 0.0;  // log-log slope of div_norms against kappa
  bool cauchy_decreasing = false;
  bool h1_decreasing = false;
  bool pressure_decreasing = false;
  bool sign_consistent = false;
};

ConvergenceSummary convergence_diagnostics(const KappaSweepReport& report);

// Checks int |u(x, tau)|^2 phi(x) dx = sqrt(tau) int |U(y)|^2 phi(sqrt(tau) y) dy and the
// matching gradient identity for u(x, tau) = tau^-1/2 U(x / sqrt(tau)), built by resampling,
// with phi a Gaussian weight of width L/4. Returns the largest relative mismatch.
double rescaling_identity_error(const VectorField& u, const std::vector<double>& taus = {1.5, 2.0, 3.0, 4.0});

}  // namespace selfsim
