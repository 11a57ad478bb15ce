#include "rnse/checks.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <random>

#include "rnse/error.hpp"
#include "rnse/littlewood_paley.hpp"
#include "rnse/operators.hpp"
#include "rnse/semigroup.hpp"

namespace rnse {
namespace {

using Vec3 = std::array<Complex, 3>;

// The multiplier written out from its definition, without the library symbol.
Vec3 closed_form(const std::array<double, 3>& k, double l, double alpha, double t, const Vec3& g) {
  const double e = std::exp(-2 * alpha);
  const double kb = std::sqrt(e * k[0] * k[0] + e * k[1] * k[1] + k[2] * k[2]);
  const Vec3 rg = {(k[2] * g[1] - e * k[1] * g[2]) / kb, (-k[2] * g[0] + e * k[0] * g[2]) / kb,
                   (k[1] * g[0] - k[0] * g[1]) / kb};
  const double ang = l * k[2] / kb * t;
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = std::exp(-kb * kb * t) * (std::cos(ang) * g[i] + std::sin(ang) * rg[i]);
  return out;
}

SpectralField random_field(const GridSpec& g, std::uint64_t seed) {
  RandomFieldOptions o;
  o.k_hi = g.n / 2 - 2;
  o.dealiased = false;
  o.seed = seed;
  return random_solenoidal_field(g, o);
}

bool skip_mode(const GridSpec& g, int i1, int i2, int i3, std::size_t idx) {
  return idx == 0 || g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3);
}

CheckResult make(std::string name, double value, double tol) {
  return {std::move(name), value, tol, value <= tol};
}

}  // namespace

std::vector<CheckResult> semigroup_checks(const SemigroupCheckOptions& opt) {
  require(opt.n >= 4 && opt.n % 2 == 0 && opt.resolvent_n >= 4 && opt.resolvent_n % 2 == 0,
          "semigroup check: grid sizes must be even and >= 4");
  require(opt.times.size() >= 2, "semigroup check: need at least two times");
  for (double t : opt.times) require(t >= 0.0 && std::isfinite(t), "semigroup check: times must be >= 0");
  GridSpec g;
  g.n = opt.n;
  g.validate();
  std::vector<CheckResult> out;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  {
    const int kmax = g.n / 2 - 1;
    std::uniform_int_distribution<int> kd(-kmax, kmax);
    double worst = 0.0;
    for (int trial = 0; trial < opt.single_modes; ++trial) {
      int k[3];
      do {
        for (int& x : k) x = kd(rng);
      } while (k[0] == 0 && k[1] == 0 && k[2] == 0);
      const double l = 5 * u(rng), alpha = u(rng), t = 1.0 + u(rng);
      const Vec3 v = {Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
      SpectralField f(g, 3);
      const std::size_t p = g.flat(g.index_of(k[0]), g.index_of(k[1]), g.index_of(k[2]));
      const std::size_t m = g.flat(g.index_of(-k[0]), g.index_of(-k[1]), g.index_of(-k[2]));
      for (int c = 0; c < 3; ++c) {
        f.at(c, p) = v[c];
        f.at(c, m) = std::conj(v[c]);
      }
      const SpectralField r = apply_semigroup(f, {l, alpha, t});
      const Vec3 e = closed_form(wavevector(g, g.index_of(k[0]), g.index_of(k[1]), g.index_of(k[2])), l, alpha, t, v);
      for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(r.at(c, p) - e[c]));
    }
    out.push_back(make("single_mode_closed_form", worst, 1e-14));
  }

  const SpectralField f = opt.data ? *opt.data : random_field(g, opt.seed + 1);
  require(f.ncomp() == 3 && f.mean_free() && divergence_defect(f) <= 1e-10,
          "semigroup check: data must be a mean-free, divergence-free vector field");
  const GridSpec& gf = f.grid();
  {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < opt.times.size(); ++i) {
      const double t = opt.times[i], s = opt.times[i + 1];
      const CoriolisSymbolParams pt{opt.l, opt.alpha, t}, ps{opt.l, opt.alpha, s}, pts{opt.l, opt.alpha, t + s};
      const SpectralField a = apply_semigroup(f, pts);
      const SpectralField b = apply_semigroup(apply_semigroup(f, ps), pt);
      worst = std::max(worst, l2_norm(a - b) / l2_norm(f));
    }
    out.push_back(make("semigroup_law", worst, 1e-10));
  }
  {
    const SpectralField h = random_field(gf, opt.seed + 2);
    double worst = 0.0;
    for (double t : opt.times) {
      const CoriolisSymbolParams p{opt.l, opt.alpha, t};
      const double lhs = inner_product(apply_semigroup(f, p), h);
      const double rhs = inner_product(f, apply_adjoint_semigroup(h, p));
      worst = std::max(worst, std::abs(lhs - rhs) / (l2_norm(f) * l2_norm(h)));
    }
    out.push_back(make("adjoint_pairing", worst, 1e-12));
  }
  {
    const Complex I(0, 1);
    double worst = 0.0;
    for (Complex lambda : {Complex(1.0), Complex(0.3, 2.0)}) {
      const CoriolisSymbolParams p{opt.l, opt.alpha, 0.0, lambda};
      const auto res = apply_resolvent(f, p);
      const double e = std::exp(-2 * opt.alpha);
      for_each_mode(gf, [&](int i1, int i2, int i3, std::size_t idx) {
        if (skip_mode(gf, i1, i2, i3, idx)) return;
        const auto k = wavevector(gf, i1, i2, i3);
        const Complex d = lambda + e * k[0] * k[0] + e * k[1] * k[1] + k[2] * k[2];
        const Complex v0 = res.velocity.at(0, idx), v1 = res.velocity.at(1, idx), v2 = res.velocity.at(2, idx);
        const Complex pi = res.pressure.at(0, idx);
        const double scale = std::sqrt(std::norm(f.at(0, idx)) + std::norm(f.at(1, idx)) + std::norm(f.at(2, idx)));
        if (scale == 0.0) return;
        const double r = std::abs(d * v0 - opt.l * v1 + e * I * k[0] * pi - f.at(0, idx)) +
                         std::abs(d * v1 + opt.l * v0 + e * I * k[1] * pi - f.at(1, idx)) +
                         std::abs(d * v2 + I * k[2] * pi - f.at(2, idx)) +
                         std::abs(k[0] * v0 + k[1] * v1 + k[2] * v2);
        worst = std::max(worst, r / scale);
      });
    }
    out.push_back(make("resolvent_substitution", worst, 1e-12));
  }
  {
    GridSpec gr;
    gr.n = opt.resolvent_n;
    const SpectralField h = random_field(gr, opt.seed + 3);
    const CoriolisSymbolParams p{opt.l, opt.alpha, 0.0, 1.0};
    const auto res = apply_resolvent(h, p);
    boost::math::quadrature::exp_sinh<double> quad;
    double worst = 0.0;
    for_each_mode(gr, [&](int i1, int i2, int i3, std::size_t idx) {
      if (skip_mode(gr, i1, i2, i3, idx)) return;
      const auto k = wavevector(gr, i1, i2, i3);
      const Vec3 v = {h.at(0, idx), h.at(1, idx), h.at(2, idx)};
      for (int c = 0; c < 3; ++c) {
        auto part = [&](double t, bool imag) {
          const Complex val = std::exp(-t) * closed_form(k, opt.l, opt.alpha, t, v)[c];
          return imag ? val.imag() : val.real();
        };
        const double re = quad.integrate([&](double t) { return part(t, false); }, 1e-13);
        const double im = quad.integrate([&](double t) { return part(t, true); }, 1e-13);
        worst = std::max(worst, std::abs(Complex(re, im) - res.velocity.at(c, idx)));
      }
    });
    out.push_back(make("resolvent_laplace_identity", worst / max_abs(h), 1e-8));
  }
  return out;
}

}  // namespace rnse
