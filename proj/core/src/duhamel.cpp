#include "selfsim/duhamel.hpp"

#include <array>
#include <cmath>

#include "selfsim/calculus.hpp"
#include "selfsim/error.hpp"
#include "selfsim/fft.hpp"

namespace selfsim {

namespace {

struct Lagrange4 {
  int base;
  std::array<double, 4> w;
};

Lagrange4 lagrange4(double p) {
  const double f = std::floor(p);
  const double t = p - f;
  return {static_cast<int>(f) - 1,
          {-t * (t - 1) * (t - 2) / 6.0, (t + 1) * (t - 1) * (t - 2) / 2.0,
           -(t + 1) * t * (t - 2) / 2.0, (t + 1) * t * (t - 1) / 6.0}};
}

// Centred transform of one component on the padded lattice: the sample at
// physical index i sits at padded index i - n/2 (mod P), so the origin is at 0.
std::vector<Complex> padded_spectrum(const ScalarField& f, int pad) {
  const GridSpec& g = f.grid();
  const int n = g.n(), P = pad * n;
  std::vector<double> cube(std::size_t(P) * P * P, 0.0);
  auto wrap = [&](int i) { return (i - n / 2 + P) % P; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        cube[(std::size_t(wrap(i)) * P + wrap(j)) * P + wrap(l)] = f[g.index(i, j, l)];
  std::vector<Complex> out(std::size_t(P) * P * (P / 2 + 1));
  forward_r2c_cube(P, cube.data(), out.data());
  return out;
}

// Samples the padded spectrum H at (2 r m1, 2 r m2, 2 r m3) for every grid
// mode (m1, m2, m3) in half-spectrum layout.
void resample(const std::vector<Complex>& H, const GridSpec& g, int pad, double r, std::vector<Complex>& t1,
              std::vector<Complex>& t2, std::vector<Complex>& out) {
  const int n = g.n(), P = pad * n, Ph = P / 2 + 1, nh = g.n_half();
  t1.resize(std::size_t(P) * P * nh);
  t2.resize(std::size_t(n) * P * nh);
  out.resize(std::size_t(n) * n * nh);

  std::vector<Lagrange4> last(nh), full(n);
  for (int c = 0; c < nh; ++c) last[c] = lagrange4(pad * r * c);
  for (int a = 0; a < n; ++a) full[a] = lagrange4(pad * r * g.signed_mode(a));

  // last axis, with Hermitian extension outside [0, P/2]
  for (int a = 0; a < P; ++a) {
    const int am = (P - a) % P;
    for (int b = 0; b < P; ++b) {
      const int bm = (P - b) % P;
      const Complex* row = &H[(std::size_t(a) * P + b) * Ph];
      const Complex* mirror = &H[(std::size_t(am) * P + bm) * Ph];
      Complex* dst = &t1[(std::size_t(a) * P + b) * nh];
      for (int c = 0; c < nh; ++c) {
        const Lagrange4& L = last[c];
        Complex acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          const int idx = L.base + k;
          Complex v;
          if (idx < 0)
            v = std::conj(mirror[-idx]);
          else if (idx >= Ph)
            v = std::conj(mirror[P - idx]);
          else
            v = row[idx];
          acc += L.w[k] * v;
        }
        dst[c] = acc;
      }
    }
  }
  // first axis (periodic in the padded index)
  for (int a = 0; a < n; ++a) {
    const Lagrange4& L = full[a];
    Complex* dst = &t2[std::size_t(a) * P * nh];
    std::fill(dst, dst + std::size_t(P) * nh, Complex(0.0));
    for (int k = 0; k < 4; ++k) {
      const int src = ((L.base + k) % P + P) % P;
      const Complex* s = &t1[std::size_t(src) * P * nh];
      const double w = L.w[k];
      for (std::size_t i = 0; i < std::size_t(P) * nh; ++i) dst[i] += w * s[i];
    }
  }
  // second axis
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Lagrange4& L = full[b];
      Complex* dst = &out[(std::size_t(a) * n + b) * nh];
      std::fill(dst, dst + nh, Complex(0.0));
      for (int k = 0; k < 4; ++k) {
        const int src = ((L.base + k) % P + P) % P;
        const Complex* s = &t2[(std::size_t(a) * P + src) * nh];
        const double w = L.w[k];
        for (int c = 0; c < nh; ++c) dst[c] += w * s[c];
      }
    }
  }
}

bool on_nyquist(const GridSpec& g, int a, int b, int c) {
  const int h = g.n() / 2;
  return a == h || b == h || c == h;
}

}  // namespace

double duhamel_psi0(double z) {
  if (std::abs(z) < 0.5) {
    double term = 0.5, sum = 0.0;
    for (int k = 0; k < 24; ++k) {
      sum += term;
      term *= -z / (k + 3);
    }
    return sum;
  }
  return (z + std::expm1(-z)) / (z * z);
}

double duhamel_psi1(double z) {
  if (std::abs(z) < 0.5) {
    // sum_k (-z)^k (k+1)/(k+2)!
    double fact = 0.5, sum = 0.0, pw = 1.0;
    for (int k = 0; k < 24; ++k) {
      sum += pw * (k + 1) * fact;
      pw *= -z;
      fact /= (k + 3);
    }
    return sum;
  }
  return (-std::expm1(-z) - z * std::exp(-z)) / (z * z);
}

DuhamelQuadrature DuhamelQuadrature::make(int q, int padding) {
  if (q < 4) throw ConfigurationError("Duhamel quadrature needs at least 4 intervals");
  if (padding != 1 && padding != 2) throw ConfigurationError("Duhamel padding must be 1 or 2");
  DuhamelQuadrature d;
  d.q = q;
  d.padding = padding;
  for (int j = 0; j <= q; ++j) d.nodes.push_back(double(j) * j / (double(q) * q));
  d.weights.assign(q + 1, 0.0);
  for (int j = 0; j < q; ++j) {
    const double h = d.nodes[j + 1] - d.nodes[j];
    d.weights[j] += 0.5 * h;
    d.weights[j + 1] += 0.5 * h;
  }
  return d;
}

DuhamelQuadrature DuhamelQuadrature::for_grid(const GridSpec& g) { return make(g.n()); }

void strip_nyquist(SpectralField& f) {
  const GridSpec& g = f.grid();
  for_each_mode(g, [&](int a, int b, int c, std::size_t idx, const Vec3&) {
    if (on_nyquist(g, a, b, c))
      for (int k = 0; k < 3; ++k) f[k][idx] = 0.0;
  });
}

VectorField strip_nyquist(const VectorField& f) {
  SpectralField h = transform(f);
  strip_nyquist(h);
  return inverse(h);
}

VectorField duhamel_apply(const VectorField& f, double kappa, const DuhamelQuadrature& quad) {
  if (quad.q < 4 || quad.nodes.size() != std::size_t(quad.q) + 1)
    throw ConfigurationError("Duhamel quadrature needs at least 4 intervals");
  if (!(kappa >= 0.0)) throw DomainError("kappa must be nonnegative");
  const GridSpec& g = f.grid();
  const std::size_t modes = g.spectral_size();

  std::array<std::vector<Complex>, 3> H;
  for (int c = 0; c < 3; ++c) H[c] = padded_spectrum(f[c], quad.padding);
  // The gradient channel reads khat.f^(p) = -i D^(p)/|p| with D = div f, so
  // divergence-free forcing never reaches it. At p = 0 the limit along khat
  // is khat.F0 with F0 = -sum x div f (equal to sum f for decaying f).
  const ScalarField div = divergence(f);
  const std::vector<Complex> D = padded_spectrum(div, quad.padding);
  Vec3 F0{0.0, 0.0, 0.0};
  for_each_point(g, [&](int, int, int, std::size_t idx, const Vec3& x) {
    for (int i = 0; i < 3; ++i) F0[i] -= x[i] * div[idx];
  });

  std::vector<double> k2(modes), khat0(modes), khat1(modes), khat2(modes);
  for_each_mode(g, [&](int, int, int, std::size_t idx, const Vec3& k) {
    k2[idx] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const double kn = std::sqrt(k2[idx]);
    if (kn > 0.0) {
      khat0[idx] = k[0] / kn;
      khat1[idx] = k[1] / kn;
      khat2[idx] = k[2] / kn;
    }
  });

  // solenoidal channel (rate 1) and gradient channel (rate 1 + kappa)
  std::array<std::vector<Complex>, 3> accS;
  for (int c = 0; c < 3; ++c) accS[c].assign(modes, 0.0);
  std::vector<Complex> accG(modes, 0.0);
  std::vector<double> wS(modes), wG(modes);
  std::vector<Complex> t1, t2, sample;
  const auto& s = quad.nodes;
  const int q = quad.q;
  const double rates[2] = {1.0, 1.0 + kappa};

  for (int j = 0; j <= q; ++j) {
    // node j is the right end of interval j-1 and the left end of interval j
    for (std::size_t m = 0; m < modes; ++m) {
      double w[2] = {0.0, 0.0};
      for (int ch = 0; ch < 2; ++ch) {
        const double lam = rates[ch] * k2[m];
        if (j > 0) {
          const double d = s[j] - s[j - 1];
          w[ch] += d * std::exp(-lam * (1.0 - s[j])) * duhamel_psi0(lam * d);
        }
        if (j < q) {
          const double d = s[j + 1] - s[j];
          w[ch] += d * std::exp(-lam * (1.0 - s[j + 1])) * duhamel_psi1(lam * d);
        }
      }
      wS[m] = w[0];
      wG[m] = w[1];
    }
    const double r = std::sqrt(s[j]);
    for (int c = 0; c < 3; ++c) {
      resample(H[c], g, quad.padding, r, t1, t2, sample);
      for (std::size_t m = 0; m < modes; ++m) accS[c][m] += wS[m] * sample[m];
    }
    if (j == 0) {
      for (std::size_t m = 0; m < modes; ++m)
        if (k2[m] > 0.0) accG[m] += wG[m] * (khat0[m] * F0[0] + khat1[m] * F0[1] + khat2[m] * F0[2]);
    } else {
      resample(D, g, quad.padding, r, t1, t2, sample);
      for (std::size_t m = 0; m < modes; ++m)
        if (k2[m] > 0.0) accG[m] += wG[m] * Complex(0.0, -1.0) * sample[m] / (r * std::sqrt(k2[m]));
    }
  }

  SpectralField out(g);
  for_each_mode(g, [&](int a, int b, int c, std::size_t idx, const Vec3& k) {
    if (on_nyquist(g, a, b, c)) return;
    const double kk = k2[idx];
    const double phase = ((g.signed_mode(a) + g.signed_mode(b) + c) & 1) ? -1.0 : 1.0;
    if (kk == 0.0) {
      for (int i = 0; i < 3; ++i) out[i][idx] = phase * accS[i][idx];
      return;
    }
    const Complex ks = (k[0] * accS[0][idx] + k[1] * accS[1][idx] + k[2] * accS[2][idx]) / kk;
    const Complex kg = accG[idx] / std::sqrt(kk);
    for (int i = 0; i < 3; ++i) out[i][idx] = phase * (accS[i][idx] - k[i] * ks + k[i] * kg);
  });
  return inverse(out);
}

}  // namespace selfsim
