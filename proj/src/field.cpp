#include "rnse/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rnse/error.hpp"

namespace rnse {

void GridSpec::validate() const {
  require(n >= 8 && n % 2 == 0, "grid: n must be an even integer >= 8, got " + std::to_string(n));
  require(box_length > 0.0 && std::isfinite(box_length), "grid: box_length must be positive");
  require(dealias_fraction > 0.0 && dealias_fraction <= 1.0,
          "grid: dealias_fraction must lie in (0, 1]");
}

SpectralField::SpectralField(const GridSpec& grid, int ncomp)
    : grid_(grid), ncomp_(ncomp), coeffs_(static_cast<std::size_t>(ncomp) * grid.points()) {
  grid.validate();
  require(ncomp >= 1, "SpectralField: ncomp must be >= 1");
}

void SpectralField::check_compatible(const SpectralField& o) const {
  require(grid_ == o.grid_ && ncomp_ == o.ncomp_, "SpectralField: incompatible operands");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  mean_free_ = mean_free_ && o.mean_free_;
  div_free_ = div_free_ && o.div_free_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  mean_free_ = mean_free_ && o.mean_free_;
  div_free_ = div_free_ && o.div_free_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
  mean_free_ = mean_free_ && o.mean_free_;
  div_free_ = div_free_ && o.div_free_;
  return *this;
}

PhysicalField::PhysicalField(const GridSpec& grid, int ncomp)
    : grid_(grid), ncomp_(ncomp), samples_(static_cast<std::size_t>(ncomp) * grid.points()) {
  grid.validate();
  require(ncomp >= 1, "PhysicalField: ncomp must be >= 1");
}

bool PhysicalField::finite() const {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

void pin_zero_mode(SpectralField& f) {
  for (int c = 0; c < f.ncomp(); ++c) f.at(c, 0) = 0.0;
  f.set_mean_free(true);
}

void zero_nyquist(SpectralField& f) {
  const GridSpec& g = f.grid();
  const int h = g.n / 2;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto comp = f.component(c);
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b) {
        comp[g.flat(h, a, b)] = 0.0;
        comp[g.flat(a, h, b)] = 0.0;
        comp[g.flat(a, b, h)] = 0.0;
      }
  }
}

double hermitian_defect(const SpectralField& f) {
  const GridSpec& g = f.grid();
  const double scale = max_abs(f);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto comp = f.component(c);
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      const std::size_t mirror = g.flat((g.n - i1) % g.n, (g.n - i2) % g.n, (g.n - i3) % g.n);
      worst = std::max(worst, std::abs(comp[idx] - std::conj(comp[mirror])));
    });
  }
  return worst / scale;
}

double divergence_residual(const SpectralField& f) {
  require(f.ncomp() == 3, "divergence_residual: needs a 3-component field");
  const GridSpec& g = f.grid();
  const double floor = 1e-13 * max_abs(f);
  double worst = 0.0;
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0) return;
    const auto k = wavevector(g, i1, i2, i3);
    const Complex u0 = f.at(0, idx), u1 = f.at(1, idx), u2 = f.at(2, idx);
    const double mag = std::max(std::sqrt(std::norm(u0) + std::norm(u1) + std::norm(u2)), floor);
    if (mag <= 0.0) return;
    const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    worst = std::max(worst, std::abs(k[0] * u0 + k[1] * u1 + k[2] * u2) / (kn * mag));
  });
  return worst;
}

double divergence_defect(const SpectralField& f) {
  require(f.ncomp() == 3, "divergence_defect: needs a 3-component field");
  const GridSpec& g = f.grid();
  const double scale = max_abs(f);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0) return;
    const auto k = wavevector(g, i1, i2, i3);
    const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    const Complex dot = k[0] * f.at(0, idx) + k[1] * f.at(1, idx) + k[2] * f.at(2, idx);
    worst = std::max(worst, std::abs(dot) / kn);
  });
  return worst / scale;
}

double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs()) s += std::norm(c);
  return std::sqrt(f.grid().volume() * s);
}

double inner_product(const SpectralField& a, const SpectralField& b) {
  require(a.grid() == b.grid() && a.ncomp() == b.ncomp(), "inner_product: incompatible fields");
  double s = 0.0;
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  for (std::size_t i = 0; i < ca.size(); ++i) s += (std::conj(ca[i]) * cb[i]).real();
  return a.grid().volume() * s;
}

double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace rnse
