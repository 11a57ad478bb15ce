#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rnse/grid.hpp"

namespace rnse {

using Complex = std::complex<double>;

/// Fourier coefficients of a real ncomp-component field on the lattice.
///
/// Layout is component-major, then k1, k2, k3 in FFT index order. The field
/// represents u(x) = sum_k coeff(k) exp(i k.x) with k the physical wavevector.
/// Vector fields have ncomp = 3; Jacobians (9) and Hessians (27) reuse the
/// type for norm bookkeeping, and scalar pressure uses ncomp = 1.
///
/// mean_free / div_free are claims made by the producer of the field; the
/// arithmetic operators keep a flag only when both operands carry it.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid, int ncomp = 3);

  const GridSpec& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }
  std::size_t points() const { return grid_.points(); }

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> component(int c) { return {coeffs_.data() + c * points(), points()}; }
  std::span<const Complex> component(int c) const {
    return {coeffs_.data() + c * points(), points()};
  }

  Complex& at(int c, std::size_t flat) { return coeffs_[c * points() + flat]; }
  const Complex& at(int c, std::size_t flat) const { return coeffs_[c * points() + flat]; }

  bool mean_free() const { return mean_free_; }
  bool div_free() const { return div_free_; }
  void set_mean_free(bool v) { mean_free_ = v; }
  void set_div_free(bool v) { div_free_ = v; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  void check_compatible(const SpectralField& o) const;

  GridSpec grid_{};
  int ncomp_ = 0;
  std::vector<Complex> coeffs_;
  bool mean_free_ = true;
  bool div_free_ = true;
};

/// Real samples of an ncomp-component field at the lattice points
/// x = (i1, i2, i3) * L / n, component-major then i1, i2, i3.
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(const GridSpec& grid, int ncomp = 3);

  const GridSpec& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }
  std::size_t points() const { return grid_.points(); }

  std::span<double> samples() { return samples_; }
  std::span<const double> samples() const { return samples_; }
  std::span<double> component(int c) { return {samples_.data() + c * points(), points()}; }
  std::span<const double> component(int c) const {
    return {samples_.data() + c * points(), points()};
  }
  double& at(int c, std::size_t flat) { return samples_[c * points() + flat]; }
  double at(int c, std::size_t flat) const { return samples_[c * points() + flat]; }

  /// True when every sample is finite.
  bool finite() const;

 private:
  GridSpec grid_{};
  int ncomp_ = 0;
  std::vector<double> samples_;
};

/// Scalar pressure recovered alongside a resolvent solve.
using PressureField = SpectralField;

/// Sets the k = 0 coefficient of every component to zero and marks mean_free.
void pin_zero_mode(SpectralField& f);

/// Zeroes every coefficient whose index on any axis is the Nyquist index.
void zero_nyquist(SpectralField& f);

/// max_k |coeff(k) - conj(coeff(-k))| relative to max |coeff| (0 for the zero
/// field). Nyquist indices pair with themselves.
double hermitian_defect(const SpectralField& f);

/// max over k != 0 of |k . u(k)| / (|k| max(|u(k)|, 1e-13 max|u|)) for
/// 3-component fields. The floor keeps round-off-level modes from dominating.
double divergence_residual(const SpectralField& f);

/// max over k != 0 of |k . u(k)| / |k|, relative to max |u| over the field.
/// Suited to fields that went through a physical-space round trip.
double divergence_defect(const SpectralField& f);

/// L^2(box) norm through Parseval: sqrt(L^3 * sum |coeff|^2).
double l2_norm(const SpectralField& f);

/// Real L^2(box) pairing sum_c integral a_c b_c dx through Parseval.
double inner_product(const SpectralField& a, const SpectralField& b);

/// max |coeff| over all components.
double max_abs(const SpectralField& f);

}  // namespace rnse
