#pragma once

#include "selfsim/field.hpp"

namespace selfsim {

// Forward transforms are unnormalized; inverse transforms divide by n^3, so
// inverse(transform(f)) == f. Plans use FFTW_ESTIMATE, which keeps the chosen
// algorithm (and therefore every rounding) identical from run to run.

SpectralScalar transform(const ScalarField& f);
ScalarField inverse(const SpectralScalar& s);

SpectralField transform(const VectorField& f);
VectorField inverse(const SpectralField& s);

// Raw unnormalized r2c transform of an m^3 cube (last index fastest) into
// m * m * (m/2 + 1) coefficients.
void forward_r2c_cube(int m, const double* in, Complex* out);

}  // namespace selfsim
