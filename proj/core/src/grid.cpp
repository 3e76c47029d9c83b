#include "selfsim/grid.hpp"

#include <cmath>
#include <string>

#include "selfsim/error.hpp"

namespace selfsim {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

GridSpec::GridSpec(int n_per_axis, double half_width, double dealias_fraction)
    : n_(n_per_axis), half_width_(half_width), dealias_fraction_(dealias_fraction) {
  if (!is_power_of_two(n_) || n_ < 4) {
    throw ConfigurationError("grid: n_per_axis must be a power of two >= 4, got " +
                             std::to_string(n_));
  }
  if (!(half_width_ > 0.0) || !std::isfinite(half_width_)) {
    throw ConfigurationError("grid: half_width must be positive and finite");
  }
  if (!(dealias_fraction_ > 0.0 && dealias_fraction_ <= 1.0)) {
    throw ConfigurationError("grid: dealias_fraction must lie in (0, 1]");
  }
}

double GridSpec::cell_volume() const {
  const double h = spacing();
  return h * h * h;
}

double GridSpec::volume() const {
  const double w = 2.0 * half_width_;
  return w * w * w;
}

double GridSpec::wavenumber(int a) const {
  if (a == n_ / 2) return 0.0;
  return wavenumber_unit() * signed_mode(a);
}

bool GridSpec::inside_dealias(int a1, int a2, int a3) const {
  const double cut = dealias_fraction_ * (n_ / 2);
  auto ok = [&](int m) { return std::abs(m) < cut; };
  return ok(signed_mode(a1)) && ok(signed_mode(a2)) && ok(a3 == n_ / 2 ? -n_ / 2 : a3);
}

}  // namespace selfsim
