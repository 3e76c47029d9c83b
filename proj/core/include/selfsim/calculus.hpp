#pragma once

#include <array>

#include "selfsim/field.hpp"

namespace selfsim {

// Fourier-multiplier calculus on the periodic box. All first-derivative
// symbols use the wavenumber vector with the Nyquist entry zeroed, and the
// Laplacian symbol is -|k|^2 of that same vector, so the identity
// lap = grad div - curl curl holds exactly mode by mode.

SpectralField spectral_gradient(const SpectralScalar& s);
SpectralScalar spectral_divergence(const SpectralField& v);
SpectralField spectral_curl(const SpectralField& v);
SpectralScalar spectral_laplacian(const SpectralScalar& s);
SpectralField spectral_laplacian(const SpectralField& v);
/// Divergence-free part (I - k k^T / |k|^2) v; the zero mode is kept whole.
SpectralField spectral_leray(const SpectralField& v);

/// Zeroes every mode outside the dealiasing cube (2/3 rule by default).
void dealias(SpectralScalar& s);
void dealias(SpectralField& v);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);
VectorField grad_div(const VectorField& v);

VectorField leray_project(const VectorField& v);

struct HelmholtzSplit {
  VectorField solenoidal;
  VectorField gradient_part;
};
/// v = solenoidal + gradient_part with div(solenoidal) = 0, curl(gradient_part) = 0.
HelmholtzSplit helmholtz_split(const VectorField& v);

/// jac[j][i] = d_j v_i.
using Jacobian = std::array<VectorField, 3>;
Jacobian jacobian(const VectorField& v);

/// Projects a field onto the dealiased band.
VectorField dealiased(const VectorField& v);
ScalarField dealiased(const ScalarField& f);

}  // namespace selfsim
