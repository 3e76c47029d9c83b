#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "selfsim/grid.hpp"

namespace selfsim {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Real scalar samples on a GridSpec.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0);

  /// Samples f(x) at every grid point.
  static ScalarField from_function(const GridSpec& grid,
                                   const std::function<double(const Vec3&)>& f);

  const GridSpec& grid() const { return grid_; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return data_.size(); }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x);

  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Throws ConfigurationError unless the grids agree.
void require_same_grid(const GridSpec& a, const GridSpec& b);

/// Three real components on a common grid.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const GridSpec& grid);
  VectorField(ScalarField c0, ScalarField c1, ScalarField c2);

  static VectorField from_function(const GridSpec& grid,
                                   const std::function<Vec3(const Vec3&)>& f);

  const GridSpec& grid() const { return comp_[0].grid(); }
  ScalarField& operator[](int c) { return comp_[c]; }
  const ScalarField& operator[](int c) const { return comp_[c]; }
  std::size_t size() const { return comp_[0].size(); }
  Vec3 at(std::size_t idx) const { return {comp_[0][idx], comp_[1][idx], comp_[2][idx]}; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  VectorField& axpy(double a, const VectorField& x);

  /// Pointwise Euclidean magnitude.
  ScalarField magnitude() const;
  bool all_finite() const;

 private:
  std::array<ScalarField, 3> comp_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Half-spectrum Fourier coefficients of a real scalar (unnormalized FFT).
class SpectralScalar {
 public:
  SpectralScalar() = default;
  explicit SpectralScalar(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::span<Complex> coefficients() { return data_; }
  std::span<const Complex> coefficients() const { return data_; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  Complex operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return data_.size(); }

  /// Coefficient at signed lattice index m, reconstructed through Hermitian
  /// symmetry when m3 < 0.
  Complex coefficient(int m1, int m2, int m3) const;

  SpectralScalar& operator+=(const SpectralScalar& o);
  SpectralScalar& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<Complex> data_;
};

/// Spectral counterpart of VectorField.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid);
  SpectralField(SpectralScalar c0, SpectralScalar c1, SpectralScalar c2);

  const GridSpec& grid() const { return comp_[0].grid(); }
  SpectralScalar& operator[](int c) { return comp_[c]; }
  const SpectralScalar& operator[](int c) const { return comp_[c]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  std::array<SpectralScalar, 3> comp_;
};

/// Calls fn(i, j, l, idx, x) over every physical grid point in storage order.
template <class Fn>
void for_each_point(const GridSpec& g, Fn&& fn) {
  const int n = g.n();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const double x0 = g.coordinate(i);
    for (int j = 0; j < n; ++j) {
      const double x1 = g.coordinate(j);
      for (int l = 0; l < n; ++l, ++idx) fn(i, j, l, idx, Vec3{x0, x1, g.coordinate(l)});
    }
  }
}

/// Calls fn(a1, a2, a3, idx, k) over every stored half-spectrum mode.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  const int n = g.n();
  const int nh = g.n_half();
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a) {
    const double k0 = g.wavenumber(a);
    for (int b = 0; b < n; ++b) {
      const double k1 = g.wavenumber(b);
      for (int c = 0; c < nh; ++c, ++idx) fn(a, b, c, idx, Vec3{k0, k1, g.wavenumber(c)});
    }
  }
}

}  // namespace selfsim
