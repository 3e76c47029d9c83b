#include "selfsim/calculus.hpp"

#include "selfsim/fft.hpp"

namespace selfsim {

namespace {
constexpr Complex kI{0.0, 1.0};
}

SpectralField spectral_gradient(const SpectralScalar& s) {
  const GridSpec& g = s.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    const Complex ik = kI * s[idx];
    for (int c = 0; c < 3; ++c) out[c][idx] = k[c] * ik;
  });
  return out;
}

SpectralScalar spectral_divergence(const SpectralField& v) {
  const GridSpec& g = v.grid();
  SpectralScalar out(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    out[idx] = kI * (k[0] * v[0][idx] + k[1] * v[1][idx] + k[2] * v[2][idx]);
  });
  return out;
}

SpectralField spectral_curl(const SpectralField& v) {
  const GridSpec& g = v.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    const Complex a = v[0][idx], b = v[1][idx], c = v[2][idx];
    out[0][idx] = kI * (k[1] * c - k[2] * b);
    out[1][idx] = kI * (k[2] * a - k[0] * c);
    out[2][idx] = kI * (k[0] * b - k[1] * a);
  });
  return out;
}

SpectralScalar spectral_laplacian(const SpectralScalar& s) {
  const GridSpec& g = s.grid();
  SpectralScalar out(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    out[idx] = -(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * s[idx];
  });
  return out;
}

SpectralField spectral_laplacian(const SpectralField& v) {
  return SpectralField(spectral_laplacian(v[0]), spectral_laplacian(v[1]),
                       spectral_laplacian(v[2]));
}

SpectralField spectral_leray(const SpectralField& v) {
  const GridSpec& g = v.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) {
      for (int c = 0; c < 3; ++c) out[c][idx] = v[c][idx];
      return;
    }
    const Complex kv = (k[0] * v[0][idx] + k[1] * v[1][idx] + k[2] * v[2][idx]) / k2;
    for (int c = 0; c < 3; ++c) out[c][idx] = v[c][idx] - k[c] * kv;
  });
  return out;
}

void dealias(SpectralScalar& s) {
  const GridSpec& g = s.grid();
  for_each_mode(g, [&](int a, int b, int c, std::size_t idx, const Vec3&) {
    if (!g.inside_dealias(a, b, c)) s[idx] = 0.0;
  });
}

void dealias(SpectralField& v) {
  for (int c = 0; c < 3; ++c) dealias(v[c]);
}

VectorField gradient(const ScalarField& f) { return inverse(spectral_gradient(transform(f))); }

ScalarField divergence(const VectorField& v) {
  return inverse(spectral_divergence(transform(v)));
}

VectorField curl(const VectorField& v) { return inverse(spectral_curl(transform(v))); }

ScalarField laplacian(const ScalarField& f) { return inverse(spectral_laplacian(transform(f))); }

VectorField laplacian(const VectorField& v) {
  return inverse(spectral_laplacian(transform(v)));
}

VectorField grad_div(const VectorField& v) {
  return inverse(spectral_gradient(spectral_divergence(transform(v))));
}

VectorField leray_project(const VectorField& v) { return inverse(spectral_leray(transform(v))); }

HelmholtzSplit helmholtz_split(const VectorField& v) {
  VectorField sol = leray_project(v);
  VectorField grad = v - sol;
  return {std::move(sol), std::move(grad)};
}

Jacobian jacobian(const VectorField& v) {
  const GridSpec& g = v.grid();
  const SpectralField vh = transform(v);
  Jacobian out{VectorField(g), VectorField(g), VectorField(g)};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      SpectralScalar d(g);
      for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
        d[idx] = kI * k[j] * vh[i][idx];
      });
      out[j][i] = inverse(d);
    }
  }
  return out;
}

VectorField dealiased(const VectorField& v) {
  SpectralField s = transform(v);
  dealias(s);
  return inverse(s);
}

ScalarField dealiased(const ScalarField& f) {
  SpectralScalar s = transform(f);
  dealias(s);
  return inverse(s);
}

}  // namespace selfsim
