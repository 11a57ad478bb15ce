#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rnse/error.hpp"
#include "rnse/fft.hpp"
#include "rnse/littlewood_paley.hpp"
#include "rnse/operators.hpp"

using namespace rnse;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec grid(int n, double L = 2 * kPi) {
  GridSpec g;
  g.n = n;
  g.box_length = L;
  return g;
}

// Div-free field on the shell |k| = radius (integer units) only.
SpectralField shell_field(const GridSpec& g, int radius, std::uint64_t seed) {
  RandomFieldOptions opt;
  opt.k_lo = radius;
  opt.k_hi = radius;
  opt.dealiased = false;
  opt.seed = seed;
  return random_solenoidal_field(g, opt);
}

}  // namespace

TEST_CASE("cutoff profile") {
  CHECK(lp_cutoff(0.5) == 1.0);
  CHECK(lp_cutoff(1.0) == 1.0);
  CHECK(lp_cutoff(2.0) == 0.0);
  CHECK(lp_cutoff(1.5) == doctest::Approx(0.5));
  for (double r = 1.01; r < 2.0; r += 0.01) CHECK(lp_cutoff(r) >= lp_cutoff(r + 0.01));
}

TEST_CASE("partition of unity on the valid annulus") {
  for (double L : {2 * kPi, 4 * kPi, 3.0}) {
    GridSpec g = grid(32, L);
    DyadicPartition part = DyadicPartition::for_grid(g);
    double worst = 0.0;
    int counted = 0;
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      if (idx == 0) return;
      const auto k = wavevector(g, i1, i2, i3);
      const double km = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
      CHECK(part.covers(km));
      double sum = 0.0;
      for (int j = part.j_min; j <= part.j_max; ++j) {
        const double w = part.weight(j, km);
        if (w != 0.0) CHECK((km > std::ldexp(1.0, j - 1) && km < std::ldexp(1.0, j + 1)));
        sum += w;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
      ++counted;
    });
    CHECK(counted == 32 * 32 * 32 - 1);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("band filter") {
  GridSpec g = grid(16);
  DyadicPartition part = DyadicPartition::for_grid(g);
  SUBCASE("support") {
    SpectralField f = shell_field(g, 4, 1);
    SpectralField b = band_filter(f, 2, part);
    CHECK(l2_norm(b - f) == 0.0);
    CHECK(max_abs(band_filter(f, 0, part)) == 0.0);
    CHECK(max_abs(band_filter(f, 4, part)) == 0.0);
  }
  SUBCASE("reassembly") {
    RandomFieldOptions opt;
    opt.k_lo = 1.0;
    opt.k_hi = 13.0;
    opt.dealiased = false;
    opt.seed = 4;
    SpectralField f = random_solenoidal_field(g, opt);
    SpectralField sum(g, 3);
    for (int j = part.j_min; j <= part.j_max; ++j) sum += band_filter(f, j, part);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i)
      worst = std::max(worst, std::abs(sum.coeffs()[i] - f.coeffs()[i]));
    CHECK(worst <= 1e-12 * max_abs(f));
    CHECK(uncovered_fraction(f, part) == 0.0);
  }
  SUBCASE("zero and range") {
    CHECK(max_abs(band_filter(SpectralField(g, 3), 1, part)) == 0.0);
    CHECK_THROWS_AS(band_filter(SpectralField(g, 3), part.j_max + 1, part), ValidationError);
  }
}

TEST_CASE("lp norms in closed form") {
  GridSpec g = grid(16);
  PhysicalField c(g, 3);
  for (std::size_t i = 0; i < g.points(); ++i) {
    c.at(0, i) = 3.0;
    c.at(1, i) = 4.0;
  }
  CHECK(lp_norm(c, 2.0) == doctest::Approx(5.0 * std::pow(2 * kPi, 1.5)).epsilon(1e-13));
  CHECK(lp_norm(c, 3.0) == doctest::Approx(5.0 * std::pow(2 * kPi, 1.0)).epsilon(1e-13));
  CHECK(lp_norm(c, kInfinity) == doctest::Approx(5.0));

  SpectralField f(g, 3);
  f.at(0, g.flat(0, 0, 1)) = 0.5;
  f.at(0, g.flat(0, 0, 15)) = 0.5;
  const double expect = std::pow(2 * kPi, 1.5) / std::sqrt(2.0);
  CHECK(lp_norm(to_physical(f), 2.0) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(expect == doctest::Approx(11.1366).epsilon(1e-4));
  CHECK(lp_norm(to_physical(f), kInfinity) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("besov norm: one and two bands") {
  GridSpec g = grid(16);
  DyadicPartition part = DyadicPartition::for_grid(g);
  SpectralField a = shell_field(g, 4, 7);
  a *= 2.5;
  for (double s : {-2.5, 0.0, 1.0})
    for (double q : {1.0, 2.0, kInfinity})
      CHECK(besov_norm(a, s, 2.0, q, part) == doctest::Approx(std::pow(2.0, 2 * s) * l2_norm(a)).epsilon(1e-12));
  SpectralField b = shell_field(g, 2, 8);
  b *= l2_norm(a) / l2_norm(b);
  CHECK(besov_norm(a + b, 0.0, 2.0, 2.0, part) ==
        doctest::Approx(std::sqrt(2.0) * besov_norm(a, 0.0, 2.0, 2.0, part)).epsilon(1e-12));
  // homogeneity, including a non-even p
  for (double p : {2.0, 1.5}) {
    const double n1 = besov_norm(a + b, -1.0, p, 2.0, part);
    const double n2 = besov_norm(-3.0 * (a + b), -1.0, p, 2.0, part);
    CHECK(std::abs(n2 - 3.0 * n1) <= 1e-12 * n2);
  }
  CHECK_THROWS_AS(besov_norm(a, 0.0, 2.0, 2.0, DyadicPartition{3, 2}), ValidationError);
}

TEST_CASE("besov norm against brute-force convolution at n = 16") {
  GridSpec g = grid(16);
  DyadicPartition part = DyadicPartition::for_grid(g);
  RandomFieldOptions opt;
  opt.k_lo = 1.0;
  opt.k_hi = 12.0;
  opt.dealiased = false;
  opt.seed = 17;
  SpectralField f = random_solenoidal_field(g, opt);
  const double s = -2.5;
  const double brute = oracle::besov_brute_force(f, s, part);
  const double fast = besov_norm(f, s, 2.0, 2.0, part);
  CHECK(std::abs(fast - brute) <= 1e-10 * brute);
}

TEST_CASE("single-band norm equivalence") {
  GridSpec g = grid(32);
  DyadicPartition part = DyadicPartition::for_grid(g);
  for (int r : {3, 5, 6, 8}) {
    SpectralField f = shell_field(g, r, 40 + r);
    const double ratio = besov_norm(f, 0.0, 2.0, 2.0, part) / l2_norm(f);
    MESSAGE("shell " << r << ": B^0_22 / L2 = " << ratio);
    CHECK(ratio >= 1.0 / std::sqrt(3.0));
    CHECK(ratio <= std::sqrt(3.0));
  }
}

TEST_CASE("norm parameters") {
  NormParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.s / 3 + 1 / p.p > 1 / p.r + 2.0 / 3);
  auto bad = [](auto mutate) {
    NormParams q;
    mutate(q);
    CHECK_THROWS_AS(q.validate(), ValidationError);
  };
  bad([](NormParams& q) { q.r = 3.0; });
  bad([](NormParams& q) { q.q_sol = 2.0; });
  bad([](NormParams& q) { q.q_sol = 2.5; });
  bad([](NormParams& q) { q.s = 0.0; });
  bad([](NormParams& q) { q.p = 1.0; });
  bad([](NormParams& q) { q.s = 0.5; });
  bad([](NormParams& q) { q.kappa = 1.2; });
  bad([](NormParams& q) { q.kappa = 2.5; });
}

TEST_CASE("trajectory norms") {
  GridSpec g = grid(16);
  NormParams params;
  SpectralField prof = shell_field(g, 3, 2);
  Trajectory zero{{0.0, 1.0}, {SpectralField(g, 3), SpectralField(g, 3)}};
  CHECK(forcing_norm_L(zero, params) == 0.0);
  CHECK(solution_norm_X(zero, params) == 0.0);
  CHECK_THROWS_AS(forcing_norm_L(Trajectory{}, params), ValidationError);

  Trajectory steady{{0.0, 0.5, 1.0}, {prof, prof, prof}};
  CHECK(forcing_norm_L(steady, params) == doctest::Approx(forcing_snapshot_norm(prof, params)).epsilon(1e-14));
  CHECK(solution_norm_X(steady, params) == doctest::Approx(solution_snapshot_norm(prof, params)).epsilon(1e-14));

  Trajectory mod;
  for (int i = 0; i <= 40; ++i) {
    const double t = i * kPi / 20.0;  // contains pi/2
    mod.times.push_back(t);
    mod.fields.push_back((1.0 + 0.5 * std::sin(t)) * prof);
  }
  CHECK(forcing_norm_L(mod, params) == doctest::Approx(1.5 * forcing_snapshot_norm(prof, params)).epsilon(1e-13));
  // separable u = a(t) g with |a| <= 1.5
  const double gx = lp_norm(prof, params.r) + lp_norm(gradient(prof, 1), params.q_sol);
  CHECK(solution_norm_X(mod, params) == doctest::Approx(1.5 * gx).epsilon(1e-13));

  double prev = 0.0;
  for (double N : {0.2, 1.0, 2.0, 10.0}) {
    const double k = window_norm_K(mod, N, params);
    CHECK(k >= prev);
    CHECK(k <= forcing_norm_L(mod, params) * (1 + 1e-15));
    prev = k;
  }
}
