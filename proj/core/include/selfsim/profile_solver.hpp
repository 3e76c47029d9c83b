#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "selfsim/duhamel.hpp"
#include "selfsim/error.hpp"
#include "selfsim/field.hpp"
#include "selfsim/initial_data.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

// Raised when continuation cannot reach mu = 1.
class NonconvergenceError : public NumericalError {
 public:
  NonconvergenceError(const std::string& what, double last_good_mu)
      : NumericalError(what), last_good_mu_(last_good_mu) {}
  double last_good_mu() const { return last_good_mu_; }

 private:
  double last_good_mu_;
};

// Radial factor H of the heat flow of the swirl at t = 1:
// S(1)[(-x2, x1, 0)/|x|^2] = (-x2, x1, 0) H(|x|), H(r) = (r - 2 D(r/2))/r^3
// with D the Dawson integral.
double swirl_heat_factor(double r);

// Cube window applied to the background: a product of erfc ramps centred at
// 0.77 L with width 0.07 L. It differs from 1 by less than 2e-7 on the inner half box.
double background_window(const Vec3& x, double half_width);

// V = S(1) u0 for the unmollified data. The swirl uses the closed form above,
// which is independent of kappa because the data are divergence free; other
// families fall back to the spectral semigroup applied to build_field(data).
VectorField background_profile(const HomogeneousData& data, const GridSpec& grid, double kappa);

// -N(V + W): the right-hand side of the equation for W.
VectorField assemble_nonlinearity(const VectorField& w, const VectorField& v_mu, ModelKind model);

// K(W, mu) = G N(mu V1 + W); solutions satisfy W + K(W, mu) = 0.
VectorField K_map(const VectorField& w, const VectorField& v1, double mu, double kappa,
                  ModelKind model, const DuhamelQuadrature& quad);

// sup (1 + |x|)^2 |W| + sup (1 + |x|)^3 |grad W|.
double x_norm(const VectorField& w);

struct ContinuationStep {
  double mu = 0.0;
  int iterations = 0;
  double fixed_point_residual = 0.0;
  bool converged = false;
};

struct ProfileSolverOptions {
  // relative fixed-point residual |W + K| / |W| at mu = 1
  double tolerance = 1e-8;
  // looser target for intermediate continuation steps
  double intermediate_tolerance = 1e-6;
  int max_iterations = 500;
  int anderson_depth = 5;
  double initial_damping = 1.0;
  // consecutive residual increases treated as divergence
  int divergence_window = 20;
  double min_step = 1.0 / 256.0;
  // Quadrature used while walking the schedule; the final solve at mu = 1
  // is polished with `fine_q` (0 means q = n). coarse_q = 0 skips the
  // coarse stage.
  int coarse_q = 16;
  int fine_q = 0;
};

struct ProfileSolution {
  ModelKind model = ModelKind::toy1;
  double kappa = 0.0;
  double mu = 0.0;
  VectorField W;
  VectorField V_mu;
  VectorField U;
  double residual_l2 = 0.0;
  double fixed_point_residual = 0.0;
  double x_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<ContinuationStep> history;
};

// Increasing mu grid with the given step, ending exactly at 1.
std::vector<double> uniform_schedule(double step = 0.1);

// Solves W + K(W, mu) = 0 along `schedule`, warm-starting each step from the
// previous one (or from *warm_start for the first). A step that diverges or
// exhausts its iteration budget is halved; below min_step the solver throws
// NonconvergenceError carrying the last converged mu.
ProfileSolution solve_profile(const VectorField& v1, double kappa, ModelKind model,
                              const std::vector<double>& schedule,
                              const ProfileSolverOptions& options = {},
                              const VectorField* warm_start = nullptr);

ProfileSolution solve_profile(const HomogeneousData& data, const GridSpec& grid, double kappa,
                              ModelKind model, const std::vector<double>& schedule = uniform_schedule(),
                              const ProfileSolverOptions& options = {});

// Writes W, V_mu and U as field dumps plus profile.json into `dir`.
void save_profile(const ProfileSolution& sol, const std::filesystem::path& dir);

}  // namespace selfsim
