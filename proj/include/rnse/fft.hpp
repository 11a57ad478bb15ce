#pragma once

#include "rnse/field.hpp"

namespace rnse {

// Inverse transform u(x) = sum_k coeff(k) exp(i k.x) at the lattice points.
// Throws ValidationError when the Hermitian defect exceeds 1e-10.
PhysicalField to_physical(const SpectralField& f);

// Forward transform coeff(k) = n^-3 sum_x u(x) exp(-i k.x). The mean_free and
// div_free flags of the result are measured, not assumed.
SpectralField to_spectral(const PhysicalField& u);

namespace detail {
// Unchecked transforms used by the operators. Two real components travel
// through one complex FFT.
void inverse_components(const SpectralField& f, PhysicalField& out);
void forward_components(const PhysicalField& u, SpectralField& out);
}  // namespace detail

}  // namespace rnse
