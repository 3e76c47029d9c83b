#include "selfsim/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"

namespace selfsim {

namespace {

double norm3(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// radial blend weight: psi(1) = 1, psi'(1) = 0, 0 <= psi <= 1
double blend(double t) { return 0.5 * t * (3.0 - t * t); }

double resolved_outer(const HomogeneousData& d, const GridSpec& g) {
  return d.window_outer < 0.0 ? 0.75 * g.half_width() : d.window_outer;
}

void validate(const HomogeneousData& d, const GridSpec& g) {
  if (!std::isfinite(d.amplitude)) throw ConfigurationError("amplitude must be finite");
  if (d.window_inner < 2.0 * g.spacing() * (1.0 - 1e-12))
    throw DomainError("window_inner must be at least two grid spacings");
  const double outer = resolved_outer(d, g);
  if (outer > g.half_width() || outer <= d.window_inner)
    throw ConfigurationError("window_outer must lie in (window_inner, L]");
  if (d.family == DataFamily::sphere_profile && !d.sphere_samples)
    throw ConfigurationError("sphere_profile family needs sphere_samples");
}

}  // namespace

std::string to_string(DataFamily f) { return f == DataFamily::swirl ? "swirl" : "sphere_profile"; }

DataFamily data_family_from_string(const std::string& s) {
  if (s == "swirl") return DataFamily::swirl;
  if (s == "sphere_profile") return DataFamily::sphere_profile;
  throw ConfigurationError("unknown data family '" + s + "'");
}

Vec3 SphereTable::evaluate(const Vec3& unit) const {
  if (n_theta < 2 || n_phi < 1 || values.size() != std::size_t(n_theta) * n_phi)
    throw ConfigurationError("malformed sphere table");
  const double pi = std::numbers::pi;
  const double theta = std::acos(std::clamp(unit[2], -1.0, 1.0));
  double phi = std::atan2(unit[1], unit[0]);
  if (phi < 0.0) phi += 2.0 * pi;
  const double ft = theta / pi * (n_theta - 1);
  const double fp = phi / (2.0 * pi) * n_phi;
  const int it = std::min(static_cast<int>(ft), n_theta - 2);
  const int ip = static_cast<int>(fp) % n_phi;
  const double wt = ft - it;
  const double wp = fp - std::floor(fp);
  auto at = [&](int a, int b) { return values[std::size_t(a) * n_phi + (b % n_phi)]; };
  Vec3 out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = (1 - wt) * ((1 - wp) * at(it, ip)[c] + wp * at(it, ip + 1)[c]) +
             wt * ((1 - wp) * at(it + 1, ip)[c] + wp * at(it + 1, ip + 1)[c]);
  }
  return out;
}

SphereTable SphereTable::tabulate(int n_theta, int n_phi, const std::function<Vec3(const Vec3&)>& a) {
  SphereTable t{n_theta, n_phi, {}};
  const double pi = std::numbers::pi;
  for (int i = 0; i < n_theta; ++i) {
    const double th = pi * i / (n_theta - 1);
    for (int j = 0; j < n_phi; ++j) {
      const double ph = 2.0 * pi * j / n_phi;
      t.values.push_back(a({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}));
    }
  }
  return t;
}

double smooth_cutoff(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  const double t = (r - r0) / (r1 - r0);
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return b / (a + b);
}

VectorField sample_homogeneous(const HomogeneousData& data, const GridSpec& grid) {
  const double s = data.amplitude;
  if (data.family == DataFamily::swirl) {
    return VectorField::from_function(grid, [s](const Vec3& x) {
      const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      if (r2 == 0.0) return Vec3{0.0, 0.0, 0.0};
      return Vec3{-s * x[1] / r2, s * x[0] / r2, 0.0};
    });
  }
  if (!data.sphere_samples) throw ConfigurationError("sphere_profile family needs sphere_samples");
  const SphereTable& table = *data.sphere_samples;
  return VectorField::from_function(grid, [s, &table](const Vec3& x) {
    const double r = norm3(x);
    if (r == 0.0) return Vec3{0.0, 0.0, 0.0};
    const Vec3 a = table.evaluate({x[0] / r, x[1] / r, x[2] / r});
    return Vec3{s * a[0] / r, s * a[1] / r, s * a[2] / r};
  });
}

VectorField mollify_origin(const VectorField& field, double rho, double degree) {
  const GridSpec& g = field.grid();
  if (rho < 2.0 * g.spacing() * (1.0 - 1e-12)) throw DomainError("mollify_origin: rho < 2h");
  VectorField out = field;

  // mean of the sphere values, read off along rays through interior points
  Vec3 mean{0.0, 0.0, 0.0};
  std::size_t count = 0;
  for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
    const double r = norm3(x);
    if (r == 0.0 || r >= rho) return;
    const double scale = std::pow(r / rho, -degree);
    for (int c = 0; c < 3; ++c) mean[c] += field[c][idx] * scale;
    ++count;
  });
  if (count > 0)
    for (double& m : mean) m /= static_cast<double>(count);

  for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
    const double r = norm3(x);
    if (r >= rho) return;
    const double t = r / rho;
    const double w = blend(t);
    const double scale = r == 0.0 ? 0.0 : std::pow(t, -degree);
    for (int c = 0; c < 3; ++c) {
      const double sphere = r == 0.0 ? 0.0 : field[c][idx] * scale;
      out[c][idx] = w * sphere + (1.0 - w) * mean[c];
    }
  });
  return out;
}

VectorField build_field_unprojected(const HomogeneousData& data, const GridSpec& grid) {
  validate(data, grid);
  VectorField u = mollify_origin(sample_homogeneous(data, grid), data.window_inner);
  const double r0 = resolved_outer(data, grid);
  const double r1 = grid.half_width();
  for_each_point(grid, [&](int, int, int, std::size_t idx, const Vec3& x) {
    const double chi = smooth_cutoff(norm3(x), r0, r1);
    for (int c = 0; c < 3; ++c) u[c][idx] *= chi;
  });
  return u;
}

VectorField build_field(const HomogeneousData& data, const GridSpec& grid) {
  return leray_project(build_field_unprojected(data, grid));
}

}  // namespace selfsim
