#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rnse/error.hpp"
#include "rnse/fft.hpp"
#include "rnse/operators.hpp"

using namespace rnse;

namespace {

GridSpec grid(int n, double L = 2.0 * std::numbers::pi) {
  GridSpec g;
  g.n = n;
  g.box_length = L;
  return g;
}

SpectralField cos_x3(const GridSpec& g) {
  SpectralField f(g, 3);
  f.at(0, g.flat(0, 0, 1)) = 0.5;
  f.at(0, g.flat(0, 0, g.n - 1)) = 0.5;
  return f;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  return l2_norm(a - b) / std::max(l2_norm(b), 1e-300);
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(grid(8).validate());
  CHECK_THROWS_AS(grid(6).validate(), ValidationError);
  CHECK_THROWS_AS(grid(9).validate(), ValidationError);
  CHECK_THROWS_AS(grid(8, -1.0).validate(), ValidationError);
  GridSpec g = grid(32);
  CHECK(g.wavenumber(16) == 16);
  CHECK(g.wavenumber(17) == -15);
  CHECK(g.index_of(-1) == 31);
  CHECK(g.dealias_cutoff() == 10);
  CHECK(g.cell_volume() == doctest::Approx(std::pow(2 * std::numbers::pi / 32, 3)));
}

TEST_CASE("to_physical: zero and single mode") {
  GridSpec g = grid(16);
  PhysicalField z = to_physical(SpectralField(g, 3));
  for (double v : z.samples()) CHECK(v == 0.0);

  PhysicalField u = to_physical(cos_x3(g));
  const double h = g.spacing();
  double err = 0.0;
  for_each_mode(g, [&](int, int, int i3, std::size_t idx) {
    err = std::max(err, std::abs(u.at(0, idx) - std::cos(i3 * h)));
    err = std::max(err, std::abs(u.at(1, idx)) + std::abs(u.at(2, idx)));
  });
  CHECK(err < 1e-15);
}

TEST_CASE("to_physical matches direct DFT at n = 8") {
  GridSpec g = grid(8);
  RandomFieldOptions opt;
  opt.k_hi = 6.0;
  opt.dealiased = false;
  opt.seed = 3;
  SpectralField f = random_solenoidal_field(g, opt);
  PhysicalField u = to_physical(f);
  for (int c = 0; c < 3; ++c) {
    auto ref = oracle::direct_inverse(f, c);
    CHECK(max_diff(u.component(c), ref) < 1e-13 * max_abs(f) * 100);
  }
}

TEST_CASE("round trip at n = 16") {
  GridSpec g = grid(16);
  RandomFieldOptions opt;
  opt.k_hi = 12.0;
  opt.dealiased = false;
  opt.seed = 11;
  SpectralField f = random_solenoidal_field(g, opt);
  SpectralField back = to_spectral(to_physical(f));
  CHECK(rel_diff(back, f) < 1e-13);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i)
    worst = std::max(worst, std::abs(back.coeffs()[i] - f.coeffs()[i]));
  CHECK(worst / max_abs(f) < 1e-13);
  CHECK(back.div_free());
  CHECK(back.mean_free());
}

TEST_CASE("to_physical rejects non-Hermitian input") {
  GridSpec g = grid(8);
  SpectralField f(g, 3);
  f.at(0, g.flat(0, 0, 1)) = 1.0;
  CHECK_THROWS_AS(to_physical(f), ValidationError);
}

TEST_CASE("Parseval") {
  GridSpec g = grid(16, 3.0);
  RandomFieldOptions opt;
  opt.k_lo = 2.0;
  opt.k_hi = 12.0;
  opt.seed = 5;
  SpectralField f = random_solenoidal_field(g, opt);
  f *= 3.7;
  PhysicalField u = to_physical(f);
  double s = 0.0;
  for (double v : u.samples()) s += v * v;
  const double phys = std::sqrt(s * g.cell_volume());
  CHECK(std::abs(phys - l2_norm(f)) / l2_norm(f) < 1e-12);
}

TEST_CASE("helmholtz projection") {
  GridSpec g = grid(16);
  SUBCASE("idempotent and self-adjoint") {
    RandomFieldOptions opt;
    opt.k_hi = 8.0;
    opt.seed = 7;
    SpectralField a = random_solenoidal_field(g, opt);
    // a gradient part makes the input generic
    SpectralField grad(g, 3);
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      if (idx == 0 || !in_dealias_set(g, i1, i2, i3)) return;
      const auto k = wavevector(g, i1, i2, i3);
      const Complex phi = a.at(0, idx) + a.at(2, idx);
      for (int c = 0; c < 3; ++c) grad.at(c, idx) = Complex(0, 1) * k[c] * phi;
    });
    SpectralField f = a + grad;
    f.set_div_free(false);
    SpectralField p = helmholtz_project(f);
    CHECK(rel_diff(helmholtz_project(p), p) < 1e-12);
    CHECK(divergence_residual(p) < 1e-12);
    opt.seed = 8;
    SpectralField b = random_solenoidal_field(g, opt) + grad;
    const double lhs = inner_product(p, b);
    const double rhs = inner_product(f, helmholtz_project(b));
    CHECK(std::abs(lhs - rhs) < 1e-12 * l2_norm(f) * l2_norm(b));
    CHECK(rel_diff(helmholtz_project(a), a) < 1e-13);
  }
  SUBCASE("gradient mode annihilated") {
    SpectralField f(g, 3);
    const std::size_t kp = g.flat(1, 1, 0), km = g.flat(g.n - 1, g.n - 1, 0);
    f.at(0, kp) = 1.0;
    f.at(1, kp) = 1.0;
    f.at(0, km) = 1.0;
    f.at(1, km) = 1.0;
    CHECK(max_abs(helmholtz_project(f)) < 1e-16);
  }
  SUBCASE("transverse mode fixed") {
    SpectralField f = cos_x3(g);
    CHECK(rel_diff(helmholtz_project(f), f) == 0.0);
  }
  SUBCASE("requires mean-free input") {
    SpectralField f(g, 3);
    f.set_mean_free(false);
    CHECK_THROWS_AS(helmholtz_project(f), ValidationError);
  }
}

TEST_CASE("gradient") {
  GridSpec g = grid(16);
  SpectralField f = cos_x3(g);
  CHECK(rel_diff(gradient(f, 0), f) == 0.0);
  CHECK_THROWS_AS(gradient(f, 3), ValidationError);

  PhysicalField d = to_physical(gradient(f, 1));
  const double h = g.spacing();
  double err = 0.0;
  for_each_mode(g, [&](int, int, int i3, std::size_t idx) {
    for (int j = 0; j < 9; ++j) {
      const double expect = j == 2 ? -std::sin(i3 * h) : 0.0;
      err = std::max(err, std::abs(d.at(j, idx) - expect));
    }
  });
  CHECK(err < 1e-14);

  PhysicalField d2 = to_physical(gradient(f, 2));
  double err2 = 0.0;
  for_each_mode(g, [&](int, int, int i3, std::size_t idx) {
    for (int j = 0; j < 27; ++j) {
      const double expect = j == 8 ? -std::cos(i3 * h) : 0.0;
      err2 = std::max(err2, std::abs(d2.at(j, idx) - expect));
    }
  });
  CHECK(err2 < 1e-14);
}

TEST_CASE("gradient converges against central differences at second order") {
  GridSpec g = grid(32);
  RandomFieldOptions opt;
  opt.k_hi = 3.0;
  opt.seed = 21;
  SpectralField f = random_solenoidal_field(g, opt);
  PhysicalField d = to_physical(gradient(f, 1));
  const double hs[3] = {0.2, 0.1, 0.05};
  double errs[3] = {0, 0, 0};
  const double dx = g.spacing();
  for (int s = 0; s < 3; ++s) {
    const double hh = hs[s];
    for (int p = 0; p < 40; ++p) {
      const int i1 = (7 * p) % g.n, i2 = (11 * p + 3) % g.n, i3 = (5 * p + 1) % g.n;
      const double x[3] = {i1 * dx, i2 * dx, i3 * dx};
      for (int c = 0; c < 3; ++c)
        for (int dd = 0; dd < 3; ++dd) {
          double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
          xp[dd] += hh;
          xm[dd] -= hh;
          const double fd = (oracle::evaluate(f, c, xp[0], xp[1], xp[2]) -
                             oracle::evaluate(f, c, xm[0], xm[1], xm[2])) /
                            (2 * hh);
          errs[s] = std::max(errs[s], std::abs(fd - d.at(3 * c + dd, g.flat(i1, i2, i3))));
        }
    }
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  MESSAGE("measured orders " << order1 << ", " << order2);
  CHECK(order1 >= 1.9);
  CHECK(order2 >= 1.9);
}

TEST_CASE("nonlinear term") {
  GridSpec g = grid(16);
  SUBCASE("zero") { CHECK(max_abs(nonlinear_term(SpectralField(g, 3))) == 0.0); }
  SUBCASE("single transverse mode along e3 gives no convection") {
    SpectralField f = cos_x3(g);
    f.at(1, g.flat(0, 0, 1)) = Complex(0, 0.3);
    f.at(1, g.flat(0, 0, g.n - 1)) = Complex(0, -0.3);
    CHECK(max_abs(nonlinear_term(f)) < 1e-16);
  }
  SUBCASE("energy neutral, dealiased, projected") {
    RandomFieldOptions opt;
    opt.k_hi = 9.0;
    opt.seed = 13;
    SpectralField u = random_solenoidal_field(g, opt);
    SpectralField nl = nonlinear_term(u);
    // unprojected convective product by quadrature for the denominator
    PhysicalField up = to_physical(u);
    PhysicalField gp = to_physical(gradient(u, 1));
    double conv2 = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int d = 0; d < 3; ++d) s += up.at(d, i) * gp.at(3 * c + d, i);
        conv2 += s * s;
      }
    const double conv_norm = std::sqrt(conv2 * g.cell_volume());
    PhysicalField np = to_physical(nl);
    double pair = 0.0;
    for (int c = 0; c < 3; ++c)
      pair += oracle::quadrature_pairing(
          std::vector<double>(np.component(c).begin(), np.component(c).end()),
          std::vector<double>(up.component(c).begin(), up.component(c).end()), g.cell_volume());
    CHECK(std::abs(pair) / (l2_norm(u) * conv_norm) <= 1e-12);
    CHECK(nl.div_free());
    CHECK(nl.mean_free());
    CHECK(divergence_residual(nl) < 1e-12);
    bool clean = true;
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      if (in_dealias_set(g, i1, i2, i3)) return;
      for (int c = 0; c < 3; ++c) clean = clean && nl.at(c, idx) == Complex(0.0);
    });
    CHECK(clean);
  }
  SUBCASE("rejects compressible input") {
    SpectralField f(g, 3);
    f.at(2, g.flat(0, 0, 1)) = 1.0;
    f.at(2, g.flat(0, 0, g.n - 1)) = 1.0;
    f.set_div_free(false);
    CHECK_THROWS_AS(nonlinear_term(f), ValidationError);
    f.set_div_free(true);
    CHECK_THROWS_AS(nonlinear_term(f), ValidationError);
  }
}
