#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rnse/field.hpp"

namespace rnse {

// Coriolis strength l and the affine scaling exponent alpha. The symbols
// use kbar = (e^-alpha k1, e^-alpha k2, k3).
struct CoriolisParams {
  double l = 0.0;
  double alpha = 0.0;
};

struct CoriolisSymbolParams {
  double l = 0.0;
  double alpha = 0.0;
  double t = 0.0;               // semigroup time, t >= 0
  Complex lambda{1.0, 0.0};     // resolvent parameter, Re lambda > 0

  CoriolisParams coriolis() const { return {l, alpha}; }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

// |kbar|^2 = e^-2a (k1^2 + k2^2) + k3^2.
double kbar_squared(const std::array<double, 3>& k, double alpha);

// R(k) = |kbar|^-1 [[0, k3, -e^-2a k2], [-k3, 0, e^-2a k1], [k2, -k1, 0]].
Mat3 rotation_symbol(const std::array<double, 3>& k, double alpha);

// e^{-|kbar|^2 t} [cos(w t) I + sin(w t) R(k)] with w = l k3 / |kbar|; the
// transpose of R when `adjoint` is set.
Mat3 semigroup_symbol(const std::array<double, 3>& k, const CoriolisSymbolParams& p,
                      bool adjoint = false);

// T(t) g. Zero mode and Nyquist planes are zero in the result; div_free is
// inherited from the input. Negative t is rejected.
SpectralField apply_semigroup(const SpectralField& g, const CoriolisSymbolParams& p);

// T*(t) g, the same multiplier with R(k) transposed.
SpectralField apply_adjoint_semigroup(const SpectralField& g, const CoriolisSymbolParams& p);

// e^{t Laplacian-bar} on any number of components.
SpectralField apply_heat(const SpectralField& g, double t, double alpha);

struct ResolventResult {
  SpectralField velocity;
  PressureField pressure;  // ncomp = 1
};

// (lambda - Laplacian-bar + l e3 x . + grad pi) v = g, div v = 0, solved modewise:
//   v = (w2/det) g + (l k3 / (det |kbar|)) R g,  w2 = lambda + |kbar|^2,
//   det = w2^2 + l^2 k3^2 / |kbar|^2,  pi = (l / |kbar|^2)(i k2 v1 - i k1 v2).
// Requires a div-free, mean-free g and Re lambda > 0.
ResolventResult apply_resolvent(const SpectralField& g, const CoriolisSymbolParams& p);

// Per-mode multiplier c0(k) I + c1(k) R(k) built once for a grid and reused.
//
// On the divergence-free plane the Stokes-Coriolis generator acts as
// L = -|kbar|^2 + w R with R^2 = -I, so any analytic phi gives
// phi(hL) = Re phi(z) I + Im phi(z) R with z = h(-|kbar|^2 + i w). For the
// exponential this is the exact semigroup on every vector; other functions
// are exact on div-free input only.
class ModeMultiplier {
 public:
  using Scalar = std::function<Complex(double kbar2, double w)>;

  ModeMultiplier() = default;
  // phi(kbar2, w) returns the complex value whose real and imaginary parts
  // become c0 and c1.
  ModeMultiplier(const GridSpec& g, const CoriolisParams& cp, const Scalar& phi);

  static ModeMultiplier semigroup(const GridSpec& g, const CoriolisParams& cp, double t);

  const GridSpec& grid() const { return grid_; }

  // out = M in  (transpose of R with `adjoint`)
  void apply(const SpectralField& in, SpectralField& out, bool adjoint = false) const;
  SpectralField apply(const SpectralField& in, bool adjoint = false) const;
  // out += s * M in
  void apply_add(const SpectralField& in, double s, SpectralField& out) const;

 private:
  GridSpec grid_{};
  double e2a_ = 1.0;
  std::vector<std::array<double, 3>> a_;  // k / |kbar|
  std::vector<double> c0_, c1_;
};

}  // namespace rnse
