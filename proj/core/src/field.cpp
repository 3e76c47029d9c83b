#include "selfsim/field.hpp"

#include <cmath>
#include <utility>

#include "selfsim/error.hpp"

namespace selfsim {

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw ConfigurationError("field: grid mismatch");
}

ScalarField::ScalarField(const GridSpec& grid, double value)
    : grid_(grid), data_(grid.size(), value) {}

ScalarField ScalarField::from_function(const GridSpec& grid,
                                       const std::function<double(const Vec3&)>& f) {
  ScalarField out(grid);
  for_each_point(grid, [&](int, int, int, std::size_t idx, const Vec3& x) { out[idx] = f(x); });
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same_grid(grid_, x.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
  return *this;
}

bool ScalarField::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(const GridSpec& grid)
    : comp_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

VectorField::VectorField(ScalarField c0, ScalarField c1, ScalarField c2)
    : comp_{std::move(c0), std::move(c1), std::move(c2)} {
  require_same_grid(comp_[0].grid(), comp_[1].grid());
  require_same_grid(comp_[0].grid(), comp_[2].grid());
}

VectorField VectorField::from_function(const GridSpec& grid,
                                       const std::function<Vec3(const Vec3&)>& f) {
  VectorField out(grid);
  for_each_point(grid, [&](int, int, int, std::size_t idx, const Vec3& x) {
    const Vec3 v = f(x);
    for (int c = 0; c < 3; ++c) out[c][idx] = v[c];
  });
  return out;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  for (int c = 0; c < 3; ++c) comp_[c] += o.comp_[c];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  for (int c = 0; c < 3; ++c) comp_[c] -= o.comp_[c];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : comp_) c *= s;
  return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& x) {
  for (int c = 0; c < 3; ++c) comp_[c].axpy(a, x.comp_[c]);
  return *this;
}

ScalarField VectorField::magnitude() const {
  ScalarField out(grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(comp_[0][i] * comp_[0][i] + comp_[1][i] * comp_[1][i] +
                       comp_[2][i] * comp_[2][i]);
  }
  return out;
}

bool VectorField::all_finite() const {
  return comp_[0].all_finite() && comp_[1].all_finite() && comp_[2].all_finite();
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

SpectralScalar::SpectralScalar(const GridSpec& grid)
    : grid_(grid), data_(grid.spectral_size(), Complex{0.0, 0.0}) {}

Complex SpectralScalar::coefficient(int m1, int m2, int m3) const {
  const int n = grid_.n();
  auto wrap = [n](int m) { return ((m % n) + n) % n; };
  if (m3 >= 0 && m3 <= n / 2) return data_[grid_.spectral_index(wrap(m1), wrap(m2), m3)];
  // conj symmetry: c(-m) = conj(c(m))
  return std::conj(data_[grid_.spectral_index(wrap(-m1), wrap(-m2), wrap(-m3))]);
}

SpectralScalar& SpectralScalar::operator+=(const SpectralScalar& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralScalar& SpectralScalar::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

SpectralField::SpectralField(const GridSpec& grid)
    : comp_{SpectralScalar(grid), SpectralScalar(grid), SpectralScalar(grid)} {}

SpectralField::SpectralField(SpectralScalar c0, SpectralScalar c1, SpectralScalar c2)
    : comp_{std::move(c0), std::move(c1), std::move(c2)} {}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  for (int c = 0; c < 3; ++c) comp_[c] += o.comp_[c];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : comp_) c *= s;
  return *this;
}

}  // namespace selfsim
