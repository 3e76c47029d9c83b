#pragma once

#include <vector>

#include "selfsim/field.hpp"

namespace selfsim {

// Nodes s_j = (j/q)^2 on [0, 1] for the Duhamel integral. `weights` are the
// trapezoid weights in s (they sum to 1); the solver itself uses product
// integration, which is exact for the heat factor between nodes.
struct DuhamelQuadrature {
  int q = 32;
  // zero-padding factor of the transform that is resampled (1 or 2)
  int padding = 2;
  std::vector<double> nodes;
  std::vector<double> weights;

  static DuhamelQuadrature make(int q, int padding = 2);
  // q = n: the node count refines with the grid
  static DuhamelQuadrature for_grid(const GridSpec& g);
};

// Applies the Fourier-Duhamel solution operator of
//   -lap W - kappa grad div W - (x/2).grad W - W/2 = f
// W^(k) = int_0^1 [e^{-(1-s)|k|^2} P + e^{-(1-s)(1+kappa)|k|^2}(I-P)] f^(sqrt(s) k) ds.
// The scaled samples f^(sqrt(s) k) are read from a 2x zero-padded transform
// with separable 4-point Lagrange interpolation. Nyquist planes are zeroed.
VectorField duhamel_apply(const VectorField& f, double kappa, const DuhamelQuadrature& quad);

// Exponential product-integration kernels: psi0(z) = (z - 1 + e^-z)/z^2,
// psi1(z) = (1 - (1 + z) e^-z)/z^2, both stable near z = 0.
double duhamel_psi0(double z);
double duhamel_psi1(double z);

// Zeroes every coefficient on a Nyquist plane.
void strip_nyquist(SpectralField& f);
VectorField strip_nyquist(const VectorField& f);

}  // namespace selfsim
