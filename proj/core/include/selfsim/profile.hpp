#pragma once

#include <string>

#include "selfsim/field.hpp"
#include "selfsim/norms.hpp"

namespace selfsim {

// toy1: u.grad u + (u/2) div u.  toy2: div(u (x) u) + grad |u|^2 / 2.
enum class ModelKind { toy1, toy2 };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& s);

// Product of 1D cutoffs, equal to 1 on |x_i| <= 7L/8 and vanishing smoothly
// at the box edge. Multiplying x by it makes the drift coefficient periodic.
ScalarField box_taper(const GridSpec& g);

// How the non-periodic coefficient x of the drift is represented: multiplied
// by box_taper, or the raw sawtooth x_i = -L + i h.
enum class DriftCoefficient { tapered, raw };

// Drift (x/2).grad W.
VectorField drift(const VectorField& w, DriftCoefficient coeff = DriftCoefficient::tapered);

// -lap W - kappa grad div W - (x/2).grad W - W/2.
VectorField profile_linear(const VectorField& w, double kappa,
                           DriftCoefficient coeff = DriftCoefficient::tapered);

// B(a, b), with nonlinearity(u) = B(u, u). Products are formed from
// dealiased factors and the result is dealiased again.
VectorField bilinear(const VectorField& a, const VectorField& b, ModelKind model);
VectorField nonlinearity(const VectorField& u, ModelKind model);

// Pointwise residual of the profile equation for U.
VectorField profile_residual_field(const VectorField& u, double kappa, ModelKind model,
                                   bool with_nonlinearity = true);

// L2 norm of the residual on `region`, divided by ||U||_{H^1} + 1.
double profile_residual(const VectorField& u, double kappa, ModelKind model,
                        bool with_nonlinearity = true, Region region = Region::inner_half_box);

}  // namespace selfsim
