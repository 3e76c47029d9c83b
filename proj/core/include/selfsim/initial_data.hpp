#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/field.hpp"
#include "selfsim/grid.hpp"

namespace selfsim {

enum class DataFamily { swirl, sphere_profile };

std::string to_string(DataFamily f);
DataFamily data_family_from_string(const std::string& s);

// Vector profile A on the unit sphere, tabulated on a (theta, phi) grid with
// theta in [0, pi] (n_theta rows, endpoints included) and phi in [0, 2 pi)
// (n_phi columns). The field is A(x/|x|)/|x|.
struct SphereTable {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<Vec3> values;  // row-major, theta outer

  Vec3 evaluate(const Vec3& unit) const;
  static SphereTable tabulate(int n_theta, int n_phi, const std::function<Vec3(const Vec3&)>& a);
};

struct HomogeneousData {
  DataFamily family = DataFamily::swirl;
  double amplitude = 0.5;
  std::optional<SphereTable> sphere_samples;
  double window_inner = 1.0;
  // negative means 0.75 L
  double window_outer = -1.0;
};

// Radial cutoff: 1 for r <= r0, 0 for r >= r1, C-infinity in between.
double smooth_cutoff(double r, double r0, double r1);

// Raw homogeneous field sampled on the grid, zero at the origin.
VectorField sample_homogeneous(const HomogeneousData& data, const GridSpec& grid);

// Windowed, origin-mollified, Leray-projected initial field.
VectorField build_field(const HomogeneousData& data, const GridSpec& grid);

// Same, without the final projection.
VectorField build_field_unprojected(const HomogeneousData& data, const GridSpec& grid);

// Replaces the field inside |x| < rho by a blend of its values on the sphere
// |x| = rho and their mean, assuming the field is homogeneous of the given
// degree there. Points with |x| >= rho are untouched.
VectorField mollify_origin(const VectorField& field, double rho, double degree = -1.0);

}  // namespace selfsim
