#pragma once

#include <map>

#include "selfsim/error.hpp"
#include "selfsim/field.hpp"

namespace selfsim {

/// Subset of the box a reduction runs over.
enum class Region {
  whole_box,
  inner_half_box,     ///< |x_i| < L/2 on every axis
  inner_quarter_box,  ///< |x_i| < L/4 on every axis
};

bool in_region(const GridSpec& g, Region r, const Vec3& x);

// Reductions below walk the grid in storage order; no reordering, so results
// are reproducible bit for bit.

double inner_product(const ScalarField& a, const ScalarField& b, Region r = Region::whole_box);
double inner_product(const VectorField& a, const VectorField& b, Region r = Region::whole_box);
double l2_norm(const ScalarField& f, Region r = Region::whole_box);
double l2_norm(const VectorField& f, Region r = Region::whole_box);
/// (sum |f|^p h^3)^(1/p) using the pointwise Euclidean magnitude.
double lp_norm(const ScalarField& f, double p, Region r = Region::whole_box);
double lp_norm(const VectorField& f, double p, Region r = Region::whole_box);
double max_norm(const VectorField& f, Region r = Region::whole_box);
/// || grad f ||_{L2} over all components.
double gradient_l2(const VectorField& f, Region r = Region::whole_box);
/// || grad^2 f ||_{L2}, summed over every second derivative of every component.
double hessian_l2(const VectorField& f, Region r = Region::whole_box);
/// sqrt(||f||^2 + ||grad f||^2).
double h1_norm(const VectorField& f, Region r = Region::whole_box);

/// sup_gamma gamma |{|f| > gamma}|^(1/p) via the decreasing rearrangement:
/// max_k f*_k (k h^3)^(1/p).
double weak_lorentz_norm(const ScalarField& f, double p);
double weak_lorentz_norm(const VectorField& f, double p);

/// Same quantity from the level-set form, sampled at `levels` geometrically
/// spaced levels between min and max of |f| (plus each level's left limit).
double weak_lorentz_norm_levels(const ScalarField& f, double p, int levels = 400);

/// |{x : |f(x)| > gamma}| measured by counting cells.
double distribution_function(const ScalarField& f, double gamma);

struct NormReport {
  double l2 = 0.0;
  double grad_l2 = 0.0;
  std::map<double, double> lp;
  double weak_l3 = 0.0;
  double h2 = 0.0;
};

NormReport norm_report(const VectorField& f, const std::vector<double>& exponents = {2, 3, 4, 6});

class InsufficientRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct DecayFit {
  double exponent = 0.0;
  /// Coefficient of determination of the log-log fit, in [0, 1].
  double confidence = 0.0;
  int shells = 0;
  /// Decay visibly faster than any power over the fitted range.
  bool super_algebraic = false;
  std::vector<double> radii;
  std::vector<double> shell_max;
};

/// Least-squares slope of log(max_{shell} |f|) against log r. The range
/// [r_min, r_max] is cut into geometric shells, `shells_per_octave` per
/// doubling of r; each shell's maximum is paired with its inner radius.
DecayFit shell_decay_fit(const ScalarField& magnitude, double r_min, double r_max,
                         int shells_per_octave = 4);
DecayFit shell_decay_fit(const VectorField& f, double r_min, double r_max,
                         int shells_per_octave = 4);

}  // namespace selfsim
