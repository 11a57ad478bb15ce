#include "rnse/operators.hpp"

#include <cmath>
#include <random>

#include "rnse/error.hpp"
#include "rnse/fft.hpp"

namespace rnse {

SpectralField helmholtz_project(const SpectralField& f) {
  require(f.ncomp() == 3, "helmholtz_project: needs a 3-component field");
  require(f.mean_free(), "helmholtz_project: input must be mean-free");
  const GridSpec& g = f.grid();
  SpectralField out(g, 3);
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0) return;
    const auto k = wavevector(g, i1, i2, i3);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const Complex dot = (k[0] * f.at(0, idx) + k[1] * f.at(1, idx) + k[2] * f.at(2, idx)) / k2;
    for (int c = 0; c < 3; ++c) out.at(c, idx) = f.at(c, idx) - k[c] * dot;
  });
  out.set_mean_free(true);
  out.set_div_free(true);
  return out;
}

SpectralField gradient(const SpectralField& f, int m) {
  require(m >= 0 && m <= 2, "gradient: derivative order must be 0, 1 or 2");
  if (m == 0) return f;
  const GridSpec& g = f.grid();
  const int nc = f.ncomp();
  const int per = m == 1 ? 3 : 9;
  SpectralField out(g, nc * per);
  const Complex I(0.0, 1.0);
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3)) return;
    const auto k = wavevector(g, i1, i2, i3);
    for (int c = 0; c < nc; ++c) {
      const Complex v = f.at(c, idx);
      if (m == 1) {
        for (int d = 0; d < 3; ++d) out.at(3 * c + d, idx) = I * k[d] * v;
      } else {
        for (int d = 0; d < 3; ++d)
          for (int e = 0; e < 3; ++e) out.at(9 * c + 3 * d + e, idx) = -k[d] * k[e] * v;
      }
    }
  });
  out.set_mean_free(true);
  out.set_div_free(false);
  return out;
}

bool in_dealias_set(const GridSpec& g, int i1, int i2, int i3) {
  const int cut = g.dealias_cutoff();
  if (g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3)) return false;
  return std::abs(g.wavenumber(i1)) <= cut && std::abs(g.wavenumber(i2)) <= cut &&
         std::abs(g.wavenumber(i3)) <= cut;
}

void apply_dealias(SpectralField& f) {
  const GridSpec& g = f.grid();
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (in_dealias_set(g, i1, i2, i3)) return;
    for (int c = 0; c < f.ncomp(); ++c) f.at(c, idx) = 0.0;
  });
}

SpectralField nonlinear_term(const SpectralField& u) {
  require(u.ncomp() == 3, "nonlinear_term: needs a 3-component field");
  require(u.div_free() && u.mean_free(), "nonlinear_term: input must be div-free and mean-free");
  require(divergence_defect(u) <= 1e-10, "nonlinear_term: input has a divergence residual");
  const GridSpec& g = u.grid();
  const std::size_t np = g.points();

  PhysicalField up(g, 3), gp(g, 9);
  detail::inverse_components(u, up);
  detail::inverse_components(gradient(u, 1), gp);

  PhysicalField conv(g, 3);
  for (int c = 0; c < 3; ++c) {
    auto out = conv.component(c);
    for (std::size_t i = 0; i < np; ++i) {
      double s = 0.0;
      for (int d = 0; d < 3; ++d) s += up.at(d, i) * gp.at(3 * c + d, i);
      out[i] = s;
    }
  }
  SpectralField spec(g, 3);
  detail::forward_components(conv, spec);
  apply_dealias(spec);
  pin_zero_mode(spec);
  return helmholtz_project(spec);
}

namespace {

void symmetrize(SpectralField& f) {
  const GridSpec& g = f.grid();
  const int n = g.n;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto comp = f.component(c);
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      const std::size_t mirror = g.flat((n - i1) % n, (n - i2) % n, (n - i3) % n);
      if (mirror < idx) return;
      const Complex avg = 0.5 * (comp[idx] + std::conj(comp[mirror]));
      comp[idx] = avg;
      comp[mirror] = std::conj(avg);
    });
  }
}

void normalize(SpectralField& f) {
  const double norm = l2_norm(f);
  if (norm > 0.0) f *= 1.0 / norm;
}

}  // namespace

SpectralField random_solenoidal_field(const GridSpec& g, const RandomFieldOptions& opt) {
  require(opt.k_lo > 0.0 && opt.k_hi >= opt.k_lo, "random field: need 0 < k_lo <= k_hi");
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(g, 3);
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    // draw for every mode so the stream does not depend on the band
    Complex v[3];
    for (auto& x : v) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      x = Complex(re, im);
    }
    if (idx == 0) return;
    if (g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3)) return;
    if (opt.dealiased && !in_dealias_set(g, i1, i2, i3)) return;
    const auto k = wavevector(g, i1, i2, i3);
    const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    if (kn < opt.k_lo - 1e-12 || kn > opt.k_hi + 1e-12) return;
    const double amp = std::pow(kn, opt.exponent);
    for (int c = 0; c < 3; ++c) f.at(c, idx) = amp * v[c];
  });
  symmetrize(f);
  f.set_mean_free(true);
  SpectralField p = helmholtz_project(f);
  normalize(p);
  return p;
}

SpectralField coherent_broadband_field(const GridSpec& g, double k_lo, double k_hi,
                                       double exponent) {
  require(k_lo > 0.0 && k_hi >= k_lo, "coherent field: need 0 < k_lo <= k_hi");
  const double e[3] = {1.0 / std::sqrt(14.0), 2.0 / std::sqrt(14.0), 3.0 / std::sqrt(14.0)};
  SpectralField f(g, 3);
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0) return;
    if (g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3)) return;
    const auto k = wavevector(g, i1, i2, i3);
    const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    if (kn < k_lo - 1e-12 || kn > k_hi + 1e-12) return;
    const double amp = std::pow(kn, exponent);
    const double dot = (k[0] * e[0] + k[1] * e[1] + k[2] * e[2]) / (kn * kn);
    for (int c = 0; c < 3; ++c) f.at(c, idx) = amp * (e[c] - k[c] * dot);
  });
  f.set_mean_free(true);
  f.set_div_free(true);
  normalize(f);
  return f;
}

}  // namespace rnse
