#include "rnse/semigroup.hpp"

#include <cmath>

#include "rnse/error.hpp"

namespace rnse {
namespace {

bool on_nyquist(const GridSpec& g, int i1, int i2, int i3) {
  return g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3);
}

double coriolis_frequency(const std::array<double, 3>& k, const CoriolisParams& cp) {
  return cp.l * k[2] / std::sqrt(kbar_squared(k, cp.alpha));
}

}  // namespace

double kbar_squared(const std::array<double, 3>& k, double alpha) {
  return std::exp(-2.0 * alpha) * (k[0] * k[0] + k[1] * k[1]) + k[2] * k[2];
}

Mat3 rotation_symbol(const std::array<double, 3>& k, double alpha) {
  const double inv = 1.0 / std::sqrt(kbar_squared(k, alpha));
  const double e = std::exp(-2.0 * alpha);
  Mat3 r{};
  r[0] = {0.0, k[2] * inv, -e * k[1] * inv};
  r[1] = {-k[2] * inv, 0.0, e * k[0] * inv};
  r[2] = {k[1] * inv, -k[0] * inv, 0.0};
  return r;
}

Mat3 semigroup_symbol(const std::array<double, 3>& k, const CoriolisSymbolParams& p,
                      bool adjoint) {
  const double kb2 = kbar_squared(k, p.alpha);
  const double w = coriolis_frequency(k, p.coriolis());
  const double decay = std::exp(-kb2 * p.t);
  const double c = decay * std::cos(w * p.t);
  const double s = decay * std::sin(w * p.t);
  const Mat3 r = rotation_symbol(k, p.alpha);
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? c : 0.0) + s * (adjoint ? r[j][i] : r[i][j]);
  return m;
}

ModeMultiplier::ModeMultiplier(const GridSpec& g, const CoriolisParams& cp, const Scalar& phi)
    : grid_(g), e2a_(std::exp(-2.0 * cp.alpha)) {
  const std::size_t np = g.points();
  a_.assign(np, {0.0, 0.0, 0.0});
  c0_.assign(np, 0.0);
  c1_.assign(np, 0.0);
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0 || on_nyquist(g, i1, i2, i3)) return;
    const auto k = wavevector(g, i1, i2, i3);
    const double kb2 = kbar_squared(k, cp.alpha);
    const double inv = 1.0 / std::sqrt(kb2);
    a_[idx] = {k[0] * inv, k[1] * inv, k[2] * inv};
    const Complex v = phi(kb2, cp.l * k[2] * inv);
    c0_[idx] = v.real();
    c1_[idx] = v.imag();
  });
}

ModeMultiplier ModeMultiplier::semigroup(const GridSpec& g, const CoriolisParams& cp, double t) {
  require(t >= 0.0, "semigroup: t must be non-negative");
  return ModeMultiplier(g, cp, [t](double kb2, double w) {
    return std::exp(-kb2 * t) * Complex(std::cos(w * t), std::sin(w * t));
  });
}

void ModeMultiplier::apply(const SpectralField& in, SpectralField& out, bool adjoint) const {
  require(in.grid() == grid_ && in.ncomp() == 3, "ModeMultiplier: field does not match grid");
  if (!(out.grid() == grid_) || out.ncomp() != 3) out = SpectralField(grid_, 3);
  const std::size_t np = grid_.points();
  const Complex* v0 = in.component(0).data();
  const Complex* v1 = in.component(1).data();
  const Complex* v2 = in.component(2).data();
  Complex* o0 = out.component(0).data();
  Complex* o1 = out.component(1).data();
  Complex* o2 = out.component(2).data();
  const double e = e2a_;
  for (std::size_t i = 0; i < np; ++i) {
    const auto& a = a_[i];
    const Complex x = v0[i], y = v1[i], z = v2[i];
    Complex r0, r1, r2;
    if (!adjoint) {
      r0 = a[2] * y - e * a[1] * z;
      r1 = -a[2] * x + e * a[0] * z;
      r2 = a[1] * x - a[0] * y;
    } else {
      r0 = -a[2] * y + a[1] * z;
      r1 = a[2] * x - a[0] * z;
      r2 = -e * a[1] * x + e * a[0] * y;
    }
    o0[i] = c0_[i] * x + c1_[i] * r0;
    o1[i] = c0_[i] * y + c1_[i] * r1;
    o2[i] = c0_[i] * z + c1_[i] * r2;
  }
  out.set_mean_free(true);
  out.set_div_free(in.div_free());
}

SpectralField ModeMultiplier::apply(const SpectralField& in, bool adjoint) const {
  SpectralField out(grid_, 3);
  apply(in, out, adjoint);
  return out;
}

void ModeMultiplier::apply_add(const SpectralField& in, double s, SpectralField& out) const {
  require(in.grid() == grid_ && in.ncomp() == 3 && out.grid() == grid_ && out.ncomp() == 3,
          "ModeMultiplier: field does not match grid");
  const std::size_t np = grid_.points();
  const Complex* v0 = in.component(0).data();
  const Complex* v1 = in.component(1).data();
  const Complex* v2 = in.component(2).data();
  Complex* o0 = out.component(0).data();
  Complex* o1 = out.component(1).data();
  Complex* o2 = out.component(2).data();
  const double e = e2a_;
  for (std::size_t i = 0; i < np; ++i) {
    const auto& a = a_[i];
    const Complex x = v0[i], y = v1[i], z = v2[i];
    const double c0 = s * c0_[i], c1 = s * c1_[i];
    o0[i] += c0 * x + c1 * (a[2] * y - e * a[1] * z);
    o1[i] += c0 * y + c1 * (-a[2] * x + e * a[0] * z);
    o2[i] += c0 * z + c1 * (a[1] * x - a[0] * y);
  }
  out.set_div_free(out.div_free() && in.div_free());
  out.set_mean_free(out.mean_free() && in.mean_free());
}

SpectralField apply_semigroup(const SpectralField& g, const CoriolisSymbolParams& p) {
  require(p.t >= 0.0, "apply_semigroup: t must be non-negative");
  require(g.mean_free(), "apply_semigroup: input must be mean-free");
  return ModeMultiplier::semigroup(g.grid(), p.coriolis(), p.t).apply(g);
}

SpectralField apply_adjoint_semigroup(const SpectralField& g, const CoriolisSymbolParams& p) {
  require(p.t >= 0.0, "apply_adjoint_semigroup: t must be non-negative");
  require(g.mean_free(), "apply_adjoint_semigroup: input must be mean-free");
  return ModeMultiplier::semigroup(g.grid(), p.coriolis(), p.t).apply(g, true);
}

SpectralField apply_heat(const SpectralField& g, double t, double alpha) {
  require(t >= 0.0, "apply_heat: t must be non-negative");
  const GridSpec& grid = g.grid();
  SpectralField out(grid, g.ncomp());
  for_each_mode(grid, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0 || on_nyquist(grid, i1, i2, i3)) return;
    const double m = std::exp(-kbar_squared(wavevector(grid, i1, i2, i3), alpha) * t);
    for (int c = 0; c < g.ncomp(); ++c) out.at(c, idx) = m * g.at(c, idx);
  });
  out.set_mean_free(true);
  out.set_div_free(g.div_free());
  return out;
}

ResolventResult apply_resolvent(const SpectralField& g, const CoriolisSymbolParams& p) {
  require(g.ncomp() == 3, "apply_resolvent: needs a 3-component field");
  require(p.lambda.real() > 0.0, "apply_resolvent: Re lambda must be positive");
  require(g.mean_free() && g.div_free(), "apply_resolvent: input must be div-free and mean-free");
  const GridSpec& grid = g.grid();
  ResolventResult res{SpectralField(grid, 3), SpectralField(grid, 1)};
  const Complex I(0.0, 1.0);
  for_each_mode(grid, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0 || on_nyquist(grid, i1, i2, i3)) return;
    const auto k = wavevector(grid, i1, i2, i3);
    const double kb2 = kbar_squared(k, p.alpha);
    const Complex w2 = p.lambda + kb2;
    const Complex det = w2 * w2 + p.l * p.l * k[2] * k[2] / kb2;
    if (std::abs(det) == 0.0) throw Error("apply_resolvent: singular mode determinant");
    const Mat3 r = rotation_symbol(k, p.alpha);
    const Complex cg = w2 / det;
    const Complex cr = p.l * k[2] / (det * std::sqrt(kb2));
    Complex v[3];
    for (int i = 0; i < 3; ++i) {
      Complex rg = 0.0;
      for (int j = 0; j < 3; ++j) rg += r[i][j] * g.at(j, idx);
      v[i] = cg * g.at(i, idx) + cr * rg;
      res.velocity.at(i, idx) = v[i];
    }
    res.pressure.at(0, idx) = (p.l / kb2) * (I * k[1] * v[0] - I * k[0] * v[1]);
  });
  res.velocity.set_mean_free(true);
  res.velocity.set_div_free(true);
  res.pressure.set_mean_free(true);
  res.pressure.set_div_free(false);
  return res;
}

}  // namespace rnse
