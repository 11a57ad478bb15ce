#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace rnse {

/// Geometry of the periodic box [0, L)^3 sampled with n points per axis.
///
/// Fourier indices run over 0..n-1 in FFT order; index i stands for the
/// integer wavenumber i (i <= n/2) or i - n (i > n/2), so the per-axis set is
/// {-n/2+1, ..., n/2}. Index n/2 is the Nyquist index and working fields keep
/// it at zero. Physical wavenumbers are the integers scaled by 2*pi/L.
struct GridSpec {
  int n = 32;
  double box_length = 2.0 * std::numbers::pi;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws ValidationError unless n is even and >= 8, L > 0 and the
  /// dealias fraction lies in (0, 1].
  void validate() const;

  std::size_t points() const { return static_cast<std::size_t>(n) * n * n; }
  double k_unit() const { return 2.0 * std::numbers::pi / box_length; }
  double spacing() const { return box_length / n; }
  double cell_volume() const { return std::pow(spacing(), 3); }
  double volume() const { return std::pow(box_length, 3); }

  int wavenumber(int index) const { return index <= n / 2 ? index : index - n; }
  int index_of(int wavenumber) const { return ((wavenumber % n) + n) % n; }
  bool is_nyquist(int index) const { return index == n / 2; }

  std::size_t flat(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * n + i2) * n + i3;
  }

  /// Largest |k_i| (integer units) kept by the dealiasing mask.
  int dealias_cutoff() const {
    return static_cast<int>(std::floor(dealias_fraction * (n / 2) + 1e-12));
  }

  /// Smallest nonzero physical wavenumber magnitude.
  double k_min() const { return k_unit(); }
  /// Largest resolved per-axis physical wavenumber (excluding Nyquist).
  double k_max() const { return k_unit() * (n / 2 - 1); }

  bool operator==(const GridSpec&) const = default;
};

/// Physical wavevector for a lattice index triple.
inline std::array<double, 3> wavevector(const GridSpec& g, int i1, int i2, int i3) {
  const double u = g.k_unit();
  return {u * g.wavenumber(i1), u * g.wavenumber(i2), u * g.wavenumber(i3)};
}

/// Calls fn(i1, i2, i3, flat_index) for every lattice index in storage order.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n; ++i1)
    for (int i2 = 0; i2 < g.n; ++i2)
      for (int i3 = 0; i3 < g.n; ++i3, ++idx) fn(i1, i2, i3, idx);
}

}  // namespace rnse
