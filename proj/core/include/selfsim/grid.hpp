#pragma once

#include <array>
#include <cstddef>
#include <numbers>

namespace selfsim {

/// Periodic box [-L, L)^3 sampled with n points per axis.
///
/// Physical index (i, j, l) maps to x = (-L + i h, -L + j h, -L + l h); the
/// last axis is fastest. Wavenumbers are pi/L * m with m in [-n/2, n/2).
/// Spectral arrays use the real-to-complex half layout n x n x (n/2 + 1);
/// the missing half follows from Hermitian symmetry.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int n_per_axis, double half_width, double dealias_fraction = 2.0 / 3.0);

  int n() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  double dealias_fraction() const { return dealias_fraction_; }
  double cell_volume() const;
  double volume() const;

  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  int n_half() const { return n_ / 2 + 1; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * n_ * n_half(); }

  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + l;
  }
  std::size_t spectral_index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_half() + l;
  }

  double coordinate(int i) const { return -half_width_ + i * spacing(); }
  std::array<double, 3> position(int i, int j, int l) const {
    return {coordinate(i), coordinate(j), coordinate(l)};
  }

  /// Signed lattice index of array position a along a full axis.
  int signed_mode(int a) const { return a < n_ / 2 ? a : a - n_; }
  /// pi/L * m, with the Nyquist index mapped to 0 so odd derivatives stay real.
  double wavenumber(int a) const;
  double wavenumber_unit() const { return std::numbers::pi / half_width_; }

  /// True when |m_d| < dealias_fraction * n/2 on every axis.
  bool inside_dealias(int a1, int a2, int a3) const;

  bool operator==(const GridSpec&) const = default;

 private:
  int n_ = 0;
  double half_width_ = 0.0;
  double dealias_fraction_ = 2.0 / 3.0;
};

}  // namespace selfsim
