#pragma once

// Brute-force reference computations shared by the unit tests. Nothing here
// calls into the transform layer.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rnse/field.hpp"
#include "rnse/littlewood_paley.hpp"

namespace oracle {

using rnse::Complex;

// Direct evaluation of sum_k c(k) exp(i k.x) for component c at point x.
inline double evaluate(const rnse::SpectralField& f, int c, double x1, double x2, double x3) {
  const auto& g = f.grid();
  Complex s = 0.0;
  rnse::for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    const Complex a = f.at(c, idx);
    if (a == Complex(0.0)) return;
    const auto k = rnse::wavevector(g, i1, i2, i3);
    s += a * std::exp(Complex(0.0, k[0] * x1 + k[1] * x2 + k[2] * x3));
  });
  return s.real();
}

// O(n^6) synthesis of every lattice sample.
inline std::vector<double> direct_inverse(const rnse::SpectralField& f, int c) {
  const auto& g = f.grid();
  std::vector<double> out(g.points());
  const double h = g.spacing();
  rnse::for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    out[idx] = evaluate(f, c, i1 * h, i2 * h, i3 * h);
  });
  return out;
}

// Quadrature L^2 pairing of two sampled fields.
inline double quadrature_pairing(const std::vector<double>& a, const std::vector<double>& b,
                                 double cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * cell;
}

using Vec3c = std::array<Complex, 3>;

// Periodic response of the mode ODE u' = L u + c e^{i nu t} taken straight
// from the PDE: L x = -|k|^2 x - l P_k (e3 x x), P_k = I - k k^T / |k|^2.
// Solves (i nu - L) x = c by Cramer's rule.
inline Vec3c mode_response(const std::array<double, 3>& k, double l, double nu, const Vec3c& c) {
  const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  // e3 x x = E x with E = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
  const double E[3][3] = {{0, -1, 0}, {1, 0, 0}, {0, 0, 0}};
  double PE[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) s += ((i == q ? 1.0 : 0.0) - k[i] * k[q] / k2) * E[q][j];
      PE[i][j] = s;
    }
  Complex A[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      A[i][j] = (i == j ? Complex(k2, nu) : Complex(0.0)) + l * PE[i][j];
  auto det = [](const Complex M[3][3]) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  };
  const Complex d = det(A);
  Vec3c x;
  for (int col = 0; col < 3; ++col) {
    Complex B[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) B[i][j] = j == col ? c[i] : A[i][j];
    x[col] = det(B) / d;
  }
  return x;
}

// Applies mode_response to every nonzero mode of a 3-component field.
inline rnse::SpectralField field_response(const rnse::SpectralField& f, double l, double nu) {
  rnse::SpectralField out(f.grid());
  rnse::for_each_mode(f.grid(), [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0) return;
    const Vec3c c{f.at(0, idx), f.at(1, idx), f.at(2, idx)};
    if (c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.0) return;
    const Vec3c x = mode_response(rnse::wavevector(f.grid(), i1, i2, i3), l, nu, c);
    for (int q = 0; q < 3; ++q) out.at(q, idx) = x[q];
  });
  return out;
}

// Hermitian pair of one mode: v at k, conj(v) at -k.
inline rnse::SpectralField single_mode(const rnse::GridSpec& g, int k1, int k2, int k3, const Complex v[3]) {
  rnse::SpectralField f(g, 3);
  const std::size_t p = g.flat(g.index_of(k1), g.index_of(k2), g.index_of(k3));
  const std::size_t m = g.flat(g.index_of(-k1), g.index_of(-k2), g.index_of(-k3));
  for (int c = 0; c < 3; ++c) {
    f.at(c, p) = v[c];
    f.at(c, m) = std::conj(v[c]);
  }
  return f;
}

// e^{-|kb|^2 t}[cos(w t) g + sin(w t) R g], R written out row by row,
// kb = (e^-a k1, e^-a k2, k3), w = l k3 / |kb|.
inline void semigroup_closed_form(const double k[3], double l, double alpha, double t, const Complex g[3],
                                  Complex out[3]) {
  const double e = std::exp(-2 * alpha);
  const double kb = std::sqrt(e * k[0] * k[0] + e * k[1] * k[1] + k[2] * k[2]);
  const double R[3][3] = {{0, k[2] / kb, -e * k[1] / kb},
                          {-k[2] / kb, 0, e * k[0] / kb},
                          {k[1] / kb, -k[0] / kb, 0}};
  const double ang = l * k[2] / kb * t;
  for (int i = 0; i < 3; ++i) {
    Complex rg = R[i][0] * g[0] + R[i][1] * g[1] + R[i][2] * g[2];
    out[i] = std::exp(-kb * kb * t) * (std::cos(ang) * g[i] + std::sin(ang) * rg);
  }
}

// B^s_{2,2} norm by physical-space convolution with each band kernel,
// O(n^6) per band and component.
inline double besov_brute_force(const rnse::SpectralField& f, double s, const rnse::DyadicPartition& part) {
  const auto& g = f.grid();
  const std::size_t np = g.points();
  const double h = g.spacing();
  std::vector<std::vector<double>> fx(f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) fx[c] = direct_inverse(f, c);
  double acc = 0.0;
  for (int j = part.j_min; j <= part.j_max; ++j) {
    // phi_j(x) = L^-3 sum_k phi_j(k) e^{ik.x} at lattice points
    std::vector<double> kernel(np, 0.0);
    std::vector<std::pair<std::array<double, 3>, double>> modes;
    rnse::for_each_mode(g, [&](int i1, int i2, int i3, std::size_t) {
      const auto k = rnse::wavevector(g, i1, i2, i3);
      const double w = part.weight(j, std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
      if (w != 0.0 && !(i1 == 0 && i2 == 0 && i3 == 0)) modes.push_back({k, w});
    });
    rnse::for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      double v = 0.0;
      for (const auto& [k, w] : modes) v += w * std::cos(h * (k[0] * i1 + k[1] * i2 + k[2] * i3));
      kernel[idx] = v / g.volume();
    });
    double band2 = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
      rnse::for_each_mode(g, [&](int x1, int x2, int x3, std::size_t) {
        double conv = 0.0;
        rnse::for_each_mode(g, [&](int y1, int y2, int y3, std::size_t yidx) {
          conv += kernel[g.flat((x1 - y1 + g.n) % g.n, (x2 - y2 + g.n) % g.n, (x3 - y3 + g.n) % g.n)] *
                  fx[c][yidx];
        });
        conv *= g.cell_volume();
        band2 += conv * conv * g.cell_volume();
      });
    }
    acc += std::pow(2.0, 2 * s * j) * band2;
  }
  return std::sqrt(acc);
}

}  // namespace oracle
