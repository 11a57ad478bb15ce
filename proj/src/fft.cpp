#include "rnse/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "rnse/error.hpp"

namespace rnse {
namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are built once per (n, sign) and never destroyed.
fftw_plan plan_for(int n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  const std::size_t size = static_cast<std::size_t>(n) * n * n;
  fftw_complex* a = fftw_alloc_complex(size);
  fftw_complex* b = fftw_alloc_complex(size);
  fftw_plan p = fftw_plan_dft_3d(n, n, n, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  plans.emplace(std::make_pair(n, sign), p);
  return p;
}

void execute(int n, int sign, std::vector<Complex>& in, std::vector<Complex>& out) {
  fftw_execute_dft(plan_for(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

namespace detail {

void inverse_components(const SpectralField& f, PhysicalField& out) {
  const GridSpec& g = f.grid();
  const std::size_t np = g.points();
  if (!(out.grid() == g) || out.ncomp() != f.ncomp()) out = PhysicalField(g, f.ncomp());
  std::vector<Complex> in(np), res(np);
  const Complex I(0.0, 1.0);
  for (int c = 0; c < f.ncomp(); c += 2) {
    const bool pair = c + 1 < f.ncomp();
    auto a = f.component(c);
    if (pair) {
      auto b = f.component(c + 1);
      for (std::size_t i = 0; i < np; ++i) in[i] = a[i] + I * b[i];
    } else {
      for (std::size_t i = 0; i < np; ++i) in[i] = a[i];
    }
    execute(g.n, FFTW_BACKWARD, in, res);
    auto u = out.component(c);
    for (std::size_t i = 0; i < np; ++i) u[i] = res[i].real();
    if (pair) {
      auto v = out.component(c + 1);
      for (std::size_t i = 0; i < np; ++i) v[i] = res[i].imag();
    }
  }
}

void forward_components(const PhysicalField& u, SpectralField& out) {
  const GridSpec& g = u.grid();
  const std::size_t np = g.points();
  const int n = g.n;
  if (!(out.grid() == g) || out.ncomp() != u.ncomp()) out = SpectralField(g, u.ncomp());
  std::vector<Complex> in(np), res(np);
  const double scale = 1.0 / static_cast<double>(np);
  for (int c = 0; c < u.ncomp(); c += 2) {
    const bool pair = c + 1 < u.ncomp();
    auto x = u.component(c);
    if (pair) {
      auto y = u.component(c + 1);
      for (std::size_t i = 0; i < np; ++i) in[i] = Complex(x[i], y[i]);
    } else {
      for (std::size_t i = 0; i < np; ++i) in[i] = Complex(x[i], 0.0);
    }
    execute(n, FFTW_FORWARD, in, res);
    auto a = out.component(c);
    if (!pair) {
      for (std::size_t i = 0; i < np; ++i) a[i] = res[i] * scale;
      continue;
    }
    // Z = A + iB with A, B Hermitian: A = (Z(k) + conj Z(-k))/2, B = (Z(k) - conj Z(-k))/2i
    auto b = out.component(c + 1);
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      const Complex z = res[idx];
      const Complex zm = std::conj(res[g.flat((n - i1) % n, (n - i2) % n, (n - i3) % n)]);
      a[idx] = 0.5 * (z + zm) * scale;
      b[idx] = Complex(0.0, -0.5) * (z - zm) * scale;
    });
  }
}

}  // namespace detail

PhysicalField to_physical(const SpectralField& f) {
  const double defect = hermitian_defect(f);
  require(defect <= 1e-10,
          "to_physical: Hermitian symmetry violated (relative defect " + std::to_string(defect) + ")");
  PhysicalField out(f.grid(), f.ncomp());
  detail::inverse_components(f, out);
  return out;
}

SpectralField to_spectral(const PhysicalField& u) {
  SpectralField out(u.grid(), u.ncomp());
  detail::forward_components(u, out);
  const double scale = max_abs(out);
  bool mean_free = true;
  for (int c = 0; c < out.ncomp(); ++c)
    if (std::abs(out.at(c, 0)) > 1e-14 * scale) mean_free = false;
  out.set_mean_free(mean_free);
  out.set_div_free(out.ncomp() == 3 && mean_free && divergence_defect(out) <= 1e-12);
  return out;
}

}  // namespace rnse
