#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rnse/field.hpp"

namespace rnse {

// Smooth radial cutoff: 1 on [0, 1], 0 on [2, inf), C-infinity in between.
double lp_cutoff(double r);

// Dyadic bands phi_j(k) = psi(2^-j |k|) - psi(2^-j+1 |k|), j_min <= j <= j_max.
// The bands telescope to exactly 1 on 2^j_min <= |k| <= 2^j_max.
struct DyadicPartition {
  int j_min = 0;
  int j_max = 5;

  // Smallest partition whose valid annulus covers every lattice |k|.
  static DyadicPartition for_grid(const GridSpec& g);

  double weight(int j, double kmag) const;
  double annulus_lo() const;
  double annulus_hi() const;
  bool covers(double kmag) const { return kmag >= annulus_lo() && kmag <= annulus_hi(); }
};

// phi_j * f on any number of components. Rejects j outside [j_min, j_max].
SpectralField band_filter(const SpectralField& f, int j, const DyadicPartition& part);

// Fraction of the L^2 energy of f outside the valid annulus (0 when fully covered).
double uncovered_fraction(const SpectralField& f, const DyadicPartition& part);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// (sum_x |f(x)|^p h^3)^(1/p) with Euclidean magnitude across components;
// p = kInfinity is the lattice maximum.
double lp_norm(const PhysicalField& f, double p);

// L^p norm of a spectral field; p = 2 goes through Parseval.
double lp_norm(const SpectralField& f, double p);

// ||{2^{sj} ||phi_j * f||_p}||_{l^q}. Requires a mean-free field; rejects an
// empty partition. `uncovered`, when given, receives uncovered_fraction(f).
double besov_norm(const SpectralField& f, double s, double p, double q, const DyadicPartition& part,
                  double* uncovered = nullptr);

// Exponents of the solution and forcing spaces.
//   forcing:  sup ||f||_{B^-s_{p,2}} + sup ||f||_kappa
//   solution: sup ||u||_r + sup ||grad u||_q_sol
struct NormParams {
  double r = 2.0;
  double q_sol = 2.2;
  double p = 2.0;
  double s = 2.5;
  double kappa = 2.0;
  double N = 1.0;
  // Optional partition override; j_min > j_max means "cover the grid".
  int j_min = 1;
  int j_max = 0;

  // Throws ValidationError unless 2 <= r < 3, 2 < q_sol <= 12/5, s > 0,
  // 1 < p <= 2, s/3 + 1/p > 1/r + 2/3 and 1/2 <= 1/kappa < 1/q_sol + 1/3.
  void validate() const;

  DyadicPartition partition(const GridSpec& g) const;
};

// Time-sampled field. Sup norms are maxima over the samples.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> fields;
};

double forcing_snapshot_norm(const SpectralField& f, const NormParams& params);
double solution_snapshot_norm(const SpectralField& u, const NormParams& params);

// sup ||f||_{B^-s_{p,2}} + sup ||f||_kappa over the samples.
double forcing_norm_L(const Trajectory& f, const NormParams& params);

// The same sups restricted to samples with |t| <= N.
double window_norm_K(const Trajectory& f, double N, const NormParams& params);

// sup ||u||_r + sup ||grad u||_q_sol (pointwise Frobenius magnitude).
double solution_norm_X(const Trajectory& u, const NormParams& params);

}  // namespace rnse
