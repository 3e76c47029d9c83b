#pragma once

#include <map>
#include <string>

#include "selfsim/field.hpp"
#include "selfsim/norms.hpp"
#include "selfsim/profile_solver.hpp"

namespace selfsim {

// Bound names:
//   "energy"  ||W||^2 + ||grad W||^2 + kappa ||div U||^2, scaled by A^2 + A^4
//   "penalty" ||kappa div U||^2, scaled by (A^2 + A^4)^2
//   "hessian" ||grad^2 W||^2 + kappa^2 ||grad div W||^2, scaled by (A^2 + A^4)^2
// with A the weak-L3 norm of u0. All integrals run over the inner half box.
struct BoundReport {
  double kappa = 0.0;
  double u0_weak_l3 = 0.0;
  std::map<std::string, double> lhs;
  std::map<std::string, double> rhs_scale;
  std::map<std::string, double> ratio;
};

BoundReport uniform_bounds_report(const ProfileSolution& sol, const VectorField& u0);

// Both sides of the two Lorentz truncation inequalities for the split of g at
// level N, with ||g||_{r,inf} from the rearrangement estimator.
struct LorentzMargins {
  double lower_lhs = 0.0;  // ||g 1_{|g|<=N}||_s^s
  double lower_rhs = 0.0;  // s/(s-r) N^(s-r) A^r - N^s |{|g| > N}|
  double upper_lhs = 0.0;  // ||g 1_{|g|>N}||_t^t
  double upper_rhs = 0.0;  // r/(r-t) N^(t-r) A^r
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  double scale = 0.0;
  bool passed = true;
};

LorentzMargins lorentz_split_check(const ScalarField& g, double N, double r, double s, double t);

// Cut level N = 1/sqrt(2 c t A^2) and the bound
// c N^-1 (A + A^3) exp(c N^2 t A^2) + c N t A^3 it is substituted into.
double cut_level(double c, double t, double weak_l3);
double truncated_energy_bound(double c, double t, double weak_l3, double N);

struct DecayReport {
  DecayFit value;     // |W|
  DecayFit gradient;  // |grad W|
};

DecayReport decay_report(const ProfileSolution& sol, double r_min = 4.0, double r_max = 8.0);

// Pointwise Frobenius norm of the Jacobian.
ScalarField gradient_magnitude(const VectorField& f);

}  // namespace selfsim
