#include "selfsim/lame_semigroup.hpp"

#include <cmath>

#include "selfsim/error.hpp"
#include "selfsim/fft.hpp"
#include "selfsim/norms.hpp"

namespace selfsim {

SpectralField apply_semigroup(const SpectralField& u, const SemigroupParams& p) {
  if (!(p.t > 0.0)) throw DomainError("semigroup time must be positive");
  if (!(p.kappa >= 0.0)) throw DomainError("kappa must be nonnegative");
  const GridSpec& g = u[0].grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const Complex a[3] = {u[0][idx], u[1][idx], u[2][idx]};
    const double es = std::exp(-k2 * p.t);
    if (k2 == 0.0) {
      for (int c = 0; c < 3; ++c) out[c][idx] = a[c];
      return;
    }
    const double eg = std::exp(-(1.0 + p.kappa) * k2 * p.t);
    const Complex kd = (k[0] * a[0] + k[1] * a[1] + k[2] * a[2]) / k2;
    for (int c = 0; c < 3; ++c) {
      const Complex grad = k[c] * kd;
      out[c][idx] = es * (a[c] - grad) + eg * grad;
    }
  });
  return out;
}

VectorField apply_semigroup(const VectorField& u0, const SemigroupParams& params) {
  return inverse(apply_semigroup(transform(u0), params));
}

WeakL3Report check_weak_l3_bound(const VectorField& u0, double kappa, const std::vector<double>& times,
                                 double c_max) {
  const double base = weak_lorentz_norm(u0, 3.0);
  if (base == 0.0) throw DomainError("weak-L3 ratio undefined for a zero field");
  WeakL3Report rep;
  rep.c_max = c_max;
  const SpectralField uh = transform(u0);
  for (double t : times) {
    const double r = weak_lorentz_norm(inverse(apply_semigroup(uh, {kappa, t})), 3.0) / base;
    rep.times.push_back(t);
    rep.ratios.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  rep.flagged = rep.max_ratio > c_max;
  return rep;
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_fit needs >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

SmoothingFit check_smoothing_rate(const VectorField& u0, double kappa, double s1, double s,
                                  const std::vector<double>& times) {
  if (s < s1) throw DomainError("smoothing rate needs s >= s1");
  if (s1 < 1.0) throw DomainError("smoothing rate needs s1 >= 1");
  SmoothingFit fit;
  fit.predicted_slope = -1.5 * (1.0 / s1 - 1.0 / s);
  const SpectralField uh = transform(u0);
  for (double t : times) {
    fit.times.push_back(t);
    fit.norms.push_back(lp_norm(inverse(apply_semigroup(uh, {kappa, t})), s));
  }
  const LogLogFit ll = loglog_fit(fit.times, fit.norms);
  fit.slope = ll.slope;
  fit.confidence = ll.r2;
  return fit;
}

}  // namespace selfsim
