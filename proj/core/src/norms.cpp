#include "selfsim/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "selfsim/calculus.hpp"
#include "selfsim/fft.hpp"

namespace selfsim {

bool in_region(const GridSpec& g, Region r, const Vec3& x) {
  double bound = 0.0;
  switch (r) {
    case Region::whole_box:
      return true;
    case Region::inner_half_box:
      bound = 0.5 * g.half_width();
      break;
    case Region::inner_quarter_box:
      bound = 0.25 * g.half_width();
      break;
  }
  return std::abs(x[0]) < bound && std::abs(x[1]) < bound && std::abs(x[2]) < bound;
}

namespace {

// sum over the region of term(idx), in storage order
double region_sum(const GridSpec& g, Region r, const std::function<double(std::size_t)>& term) {
  double acc = 0.0;
  if (r == Region::whole_box) {
    for (std::size_t i = 0; i < g.size(); ++i) acc += term(i);
    return acc;
  }
  for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
    if (in_region(g, r, x)) acc += term(idx);
  });
  return acc;
}

std::vector<double> sorted_descending(const ScalarField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

double inner_product(const ScalarField& a, const ScalarField& b, Region r) {
  const GridSpec& g = a.grid();
  return g.cell_volume() * region_sum(g, r, [&](std::size_t i) { return a[i] * b[i]; });
}

double inner_product(const VectorField& a, const VectorField& b, Region r) {
  const GridSpec& g = a.grid();
  return g.cell_volume() * region_sum(g, r, [&](std::size_t i) {
           return a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i];
         });
}

double l2_norm(const ScalarField& f, Region r) { return std::sqrt(inner_product(f, f, r)); }
double l2_norm(const VectorField& f, Region r) { return std::sqrt(inner_product(f, f, r)); }

double lp_norm(const ScalarField& f, double p, Region r) {
  if (!(p > 0.0)) throw DomainError("lp_norm: p must be positive");
  const GridSpec& g = f.grid();
  const double s = region_sum(g, r, [&](std::size_t i) { return std::pow(std::abs(f[i]), p); });
  return std::pow(g.cell_volume() * s, 1.0 / p);
}

double lp_norm(const VectorField& f, double p, Region r) { return lp_norm(f.magnitude(), p, r); }

double max_norm(const VectorField& f, Region r) {
  const ScalarField m = f.magnitude();
  double best = 0.0;
  for_each_point(m.grid(), [&](int, int, int, std::size_t idx, const Vec3& x) {
    if (in_region(m.grid(), r, x)) best = std::max(best, m[idx]);
  });
  return best;
}

double gradient_l2(const VectorField& f, Region r) {
  const Jacobian jac = jacobian(f);
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += inner_product(jac[j], jac[j], r);
  return std::sqrt(s);
}

double hessian_l2(const VectorField& f, Region r) {
  const GridSpec& g = f.grid();
  const SpectralField fh = transform(f);
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        SpectralScalar d(g);
        for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
          d[idx] = -k[a] * k[b] * fh[c][idx];
        });
        const ScalarField dd = inverse(d);
        s += inner_product(dd, dd, r);
      }
    }
  }
  return std::sqrt(s);
}

double h1_norm(const VectorField& f, Region r) {
  const double a = l2_norm(f, r);
  const double b = gradient_l2(f, r);
  return std::sqrt(a * a + b * b);
}

double weak_lorentz_norm(const ScalarField& f, double p) {
  if (!(p > 0.0)) throw DomainError("weak_lorentz_norm: p must be positive");
  if (f.size() == 0) return 0.0;
  const std::vector<double> v = sorted_descending(f);
  const double cell = f.grid().cell_volume();
  double best = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0.0) break;
    best = std::max(best, v[k] * std::pow(static_cast<double>(k + 1) * cell, 1.0 / p));
  }
  return best;
}

double weak_lorentz_norm(const VectorField& f, double p) {
  return weak_lorentz_norm(f.magnitude(), p);
}

double distribution_function(const ScalarField& f, double gamma) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) > gamma) ++count;
  return static_cast<double>(count) * f.grid().cell_volume();
}

double weak_lorentz_norm_levels(const ScalarField& f, double p, int levels) {
  if (!(p > 0.0)) throw DomainError("weak_lorentz_norm_levels: p must be positive");
  if (levels < 2) throw ConfigurationError("weak_lorentz_norm_levels: need >= 2 levels");
  const std::vector<double> v = sorted_descending(f);
  if (v.empty() || v.front() == 0.0) return 0.0;
  double lo = v.front();
  for (double x : v)
    if (x > 0.0) lo = x;
  const double hi = v.front();
  const double cell = f.grid().cell_volume();
  // count of samples strictly above gamma, from the sorted array
  auto above = [&](double gamma) {
    auto it = std::upper_bound(v.begin(), v.end(), gamma, std::greater<>());
    // it points at the first element <= gamma
    return static_cast<double>(it - v.begin()) * cell;
  };
  double best = 0.0;
  for (int j = 0; j < levels; ++j) {
    const double t = static_cast<double>(j) / (levels - 1);
    const double gamma = lo * std::pow(hi / lo, t);
    // the left limit gamma^- counts the samples equal to gamma as well
    const double below = std::nextafter(gamma, 0.0);
    best = std::max(best, gamma * std::pow(above(gamma), 1.0 / p));
    best = std::max(best, below * std::pow(above(below), 1.0 / p));
  }
  return best;
}

NormReport norm_report(const VectorField& f, const std::vector<double>& exponents) {
  NormReport rep;
  const ScalarField mag = f.magnitude();
  rep.l2 = l2_norm(f);
  rep.grad_l2 = gradient_l2(f);
  for (double p : exponents) rep.lp[p] = lp_norm(mag, p);
  rep.weak_l3 = weak_lorentz_norm(mag, 3.0);
  rep.h2 = hessian_l2(f);
  return rep;
}

DecayFit shell_decay_fit(const ScalarField& magnitude, double r_min, double r_max,
                         int shells_per_octave) {
  const GridSpec& g = magnitude.grid();
  const double h = g.spacing();
  if (shells_per_octave < 1) throw ConfigurationError("shell_decay_fit: shells_per_octave >= 1");
  if (!(r_min >= 8.0 * h * (1.0 - 1e-12)) || !(r_max > r_min) ||
      !(r_max <= 0.5 * g.half_width() * (1.0 + 1e-12))) {
    throw InsufficientRangeError("shell_decay_fit: need 8h <= r_min < r_max <= L/2");
  }
  const double ratio = std::pow(2.0, 1.0 / shells_per_octave);
  std::vector<double> edges{r_min};
  while (edges.back() * ratio <= r_max * (1.0 + 1e-12)) edges.push_back(edges.back() * ratio);
  const int shells = static_cast<int>(edges.size()) - 1;
  if (shells < 3) throw InsufficientRangeError("shell_decay_fit: fewer than 3 shells in range");

  std::vector<double> smax(shells, 0.0);
  for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r < edges.front() || r >= edges.back()) return;
    const auto it = std::upper_bound(edges.begin(), edges.end(), r);
    const int s = static_cast<int>(it - edges.begin()) - 1;
    smax[s] = std::max(smax[s], std::abs(magnitude[idx]));
  });

  DecayFit fit;
  fit.shells = shells;
  fit.radii.assign(edges.begin(), edges.end() - 1);
  fit.shell_max = smax;

  std::vector<double> lx, ly;
  const double floor = std::numeric_limits<double>::min();
  for (int s = 0; s < shells; ++s) {
    lx.push_back(std::log(fit.radii[s]));
    ly.push_back(std::log(std::max(smax[s], floor)));
  }
  const double n = shells;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int s = 0; s < shells; ++s) {
    sxx += (lx[s] - mx) * (lx[s] - mx);
    sxy += (lx[s] - mx) * (ly[s] - my);
    syy += (ly[s] - my) * (ly[s] - my);
  }
  fit.exponent = sxy / sxx;
  fit.confidence = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;

  // steepening local slopes together with a steep overall slope
  const double first = (ly[1] - ly[0]) / (lx[1] - lx[0]);
  const double last = (ly[shells - 1] - ly[shells - 2]) / (lx[shells - 1] - lx[shells - 2]);
  fit.super_algebraic = fit.exponent < -6.0 && last < 1.5 * first;
  return fit;
}

DecayFit shell_decay_fit(const VectorField& f, double r_min, double r_max, int shells_per_octave) {
  return shell_decay_fit(f.magnitude(), r_min, r_max, shells_per_octave);
}

}  // namespace selfsim
