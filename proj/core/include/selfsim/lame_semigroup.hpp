#pragma once

#include <vector>

#include "selfsim/field.hpp"

namespace selfsim {

struct SemigroupParams {
  double kappa = 0.0;
  double t = 1.0;
};

// Solution operator of the Lame heat system: the solenoidal part diffuses with
// rate 1, the gradient part with rate 1 + kappa.
VectorField apply_semigroup(const VectorField& u0, const SemigroupParams& params);
SpectralField apply_semigroup(const SpectralField& u0_hat, const SemigroupParams& params);

struct WeakL3Report {
  std::vector<double> times;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double c_max = 10.0;
  bool flagged = false;
};

// Ratio of weak-L3 norms of S(t)u0 and u0 over the given times.
WeakL3Report check_weak_l3_bound(const VectorField& u0, double kappa, const std::vector<double>& times,
                                 double c_max = 10.0);

struct SmoothingFit {
  double slope = 0.0;
  // -(3/2)(1/s1 - 1/s)
  double predicted_slope = 0.0;
  double confidence = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

// Log-log slope of ||S(t)u0||_{L_s} against t.
SmoothingFit check_smoothing_rate(const VectorField& u0, double kappa, double s1, double s,
                                  const std::vector<double>& times);

// Least-squares slope and R^2 of log y against log x.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace selfsim
