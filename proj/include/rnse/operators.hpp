#pragma once

#include <cstdint>

#include "rnse/field.hpp"

namespace rnse {

// (I - k k^T / |k|^2) per mode, zero mode zero. Requires a mean-free
// 3-component field; the result is flagged div_free.
SpectralField helmholtz_project(const SpectralField& f);

// Spectral derivatives of every component.
//   m = 0: copy
//   m = 1: 9 components, index 3*c + d holds d_d u_c
//   m = 2: 27 components, index 9*c + 3*d + e holds d_d d_e u_c
// Nyquist coefficients of the result are zero.
SpectralField gradient(const SpectralField& f, int m);

// P[(u.grad) u] in convective form: products in physical space, every mode
// with some |k_i| > dealias_fraction * n/2 removed, then projected.
// Rejects input that is not div-free (flag or measured residual > 1e-10).
SpectralField nonlinear_term(const SpectralField& u);

// Zeroes every mode outside the dealiasing cube and the Nyquist planes.
void apply_dealias(SpectralField& f);

// True when each |k_i| <= dealias_cutoff and no index is Nyquist.
bool in_dealias_set(const GridSpec& g, int i1, int i2, int i3);

struct RandomFieldOptions {
  // Physical |k| band, inclusive.
  double k_lo = 1.0;
  double k_hi = 4.0;
  // Coefficient magnitude scales like |k|^exponent before the random factor.
  double exponent = 0.0;
  // Restrict the support to the dealiasing cube.
  bool dealiased = true;
  std::uint64_t seed = 1;
};

// Real, mean-free, div-free field with complex Gaussian coefficients on the
// requested band, normalised to unit L^2 norm.
SpectralField random_solenoidal_field(const GridSpec& g, const RandomFieldOptions& opt);

// Phase-coherent broadband data u(k) = |k|^exponent P_k e on k_lo <= |k| <= k_hi
// with e = (1, 2, 3)/sqrt(14), unit L^2 norm. Coefficients are real, so all
// bands peak at the origin together like a scale-free profile.
SpectralField coherent_broadband_field(const GridSpec& g, double k_lo, double k_hi,
                                       double exponent);

}  // namespace rnse
