#include "selfsim/profile.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/fft.hpp"
#include "selfsim/initial_data.hpp"

namespace selfsim {

std::string to_string(ModelKind m) { return m == ModelKind::toy1 ? "toy1" : "toy2"; }

ModelKind model_from_string(const std::string& s) {
  if (s == "toy1") return ModelKind::toy1;
  if (s == "toy2") return ModelKind::toy2;
  throw ConfigurationError("unknown model '" + s + "'");
}

ScalarField box_taper(const GridSpec& g) {
  const double L = g.half_width();
  return ScalarField::from_function(g, [L](const Vec3& x) {
    double t = 1.0;
    for (double xi : x) t *= smooth_cutoff(std::abs(xi), 0.875 * L, L);
    return t;
  });
}

namespace {

// tapered x/2, cached per grid
// x/2, tapered or raw, cached per grid
const VectorField& half_position(const GridSpec& g, DriftCoefficient coeff) {
  static std::mutex m;
  static std::map<std::tuple<int, double, int>, VectorField> cache;
  std::lock_guard lock(m);
  const auto key = std::make_tuple(g.n(), g.half_width(), static_cast<int>(coeff));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  VectorField x = VectorField::from_function(g, [](const Vec3& p) { return Vec3{0.5 * p[0], 0.5 * p[1], 0.5 * p[2]}; });
  if (coeff == DriftCoefficient::tapered) {
    const ScalarField tau = box_taper(g);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < g.size(); ++i) x[c][i] *= tau[i];
  }
  return cache.emplace(key, std::move(x)).first->second;
}

}  // namespace

VectorField drift(const VectorField& w, DriftCoefficient coeff) {
  const GridSpec& g = w.grid();
  const VectorField& xh = half_position(g, coeff);
  const Jacobian jac = jacobian(w);
  VectorField out(g);
  for (std::size_t p = 0; p < g.size(); ++p)
    for (int i = 0; i < 3; ++i)
      out[i][p] = xh[0][p] * jac[0][i][p] + xh[1][p] * jac[1][i][p] + xh[2][p] * jac[2][i][p];
  return out;
}

VectorField profile_linear(const VectorField& w, double kappa, DriftCoefficient coeff) {
  const GridSpec& g = w.grid();
  const SpectralField wh = transform(w);
  SpectralField lin(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const Complex kd = k[0] * wh[0][idx] + k[1] * wh[1][idx] + k[2] * wh[2][idx];
    // -lap -> k^2, -kappa grad div -> kappa k (k . w)
    for (int c = 0; c < 3; ++c) lin[c][idx] = k2 * wh[c][idx] + kappa * k[c] * kd - 0.5 * wh[c][idx];
  });
  VectorField out = inverse(lin);
  out -= drift(w, coeff);
  return out;
}

VectorField bilinear(const VectorField& a_in, const VectorField& b_in, ModelKind model) {
  const GridSpec& g = a_in.grid();
  require_same_grid(g, b_in.grid());
  const VectorField a = dealiased(a_in);
  const VectorField b = dealiased(b_in);
  VectorField out(g);
  if (model == ModelKind::toy1) {
    const Jacobian jb = jacobian(b);
    const ScalarField db = divergence(b);
    for (std::size_t p = 0; p < g.size(); ++p)
      for (int i = 0; i < 3; ++i)
        out[i][p] = a[0][p] * jb[0][i][p] + a[1][p] * jb[1][i][p] + a[2][p] * jb[2][i][p] + 0.5 * a[i][p] * db[p];
    return dealiased(out);
  }
  // toy2: d_j (a_j b_i) + d_i (a . b) / 2
  SpectralField res(g);
  ScalarField prod(g);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      for (std::size_t p = 0; p < g.size(); ++p) prod[p] = a[j][p] * b[i][p];
      const SpectralScalar ph = transform(prod);
      for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
        res[i][idx] += Complex(0.0, k[j]) * ph[idx];
      });
    }
  }
  for (std::size_t p = 0; p < g.size(); ++p)
    prod[p] = 0.5 * (a[0][p] * b[0][p] + a[1][p] * b[1][p] + a[2][p] * b[2][p]);
  const SpectralScalar ph = transform(prod);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    for (int i = 0; i < 3; ++i) res[i][idx] += Complex(0.0, k[i]) * ph[idx];
  });
  dealias(res);
  return inverse(res);
}

VectorField nonlinearity(const VectorField& u, ModelKind model) { return bilinear(u, u, model); }

VectorField profile_residual_field(const VectorField& u, double kappa, ModelKind model,
                                   bool with_nonlinearity) {
  VectorField r = profile_linear(u, kappa);
  if (with_nonlinearity) r += nonlinearity(u, model);
  return r;
}

double profile_residual(const VectorField& u, double kappa, ModelKind model, bool with_nonlinearity,
                        Region region) {
  const VectorField r = profile_residual_field(u, kappa, model, with_nonlinearity);
  return l2_norm(r, region) / (h1_norm(u) + 1.0);
}

}  // namespace selfsim
