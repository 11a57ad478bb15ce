#pragma once

#include <string>
#include <vector>

#include "rnse/field.hpp"
#include "rnse/littlewood_paley.hpp"
#include "rnse/symmetry.hpp"

namespace rnse {

enum class ForcingKind { kRotatingPeriodic, kSpiralAlmostPeriodic, kSpiralAlmostAutomorphic };

std::string to_string(ForcingKind k);
ForcingKind forcing_kind_from_string(const std::string& s);

struct ForcingSpec {
  ForcingKind kind = ForcingKind::kRotatingPeriodic;
  SpectralField profile;  // g: div-free, mean-free, band-limited
  double delta = 1e-2;    // target ||f||_L; <= 0 keeps the profile amplitude
  AffineSpec affine;
  double beta = 0.0;            // modulation depth
  double frequency_ratio = 0.0; // Omega T / 2 pi
  // Samples per period used for the sup over the rotation blend.
  int norm_samples = 64;
};

// f(t) = rot(t) (1 + beta cos(Omega t)) where
//   rot(t) = sum_{j<M} w(t - jT) R_Q^j g,  w(t) = (1 + cos(2 pi t / (M T))) / M
// and M is the order of R_Q, so rot(t + T) = R_Q rot(t) exactly. Angles that
// are not lattice-exact use M = 1 with a resampled rotation per evaluation
// (rot(t) = R_{Q(theta t / T)} g) and record a warning.
//
// The amplitude is scaled so that ||f||_L = delta, where
// ||f||_L = (1 + |beta|)(sup_t ||rot||_{B^-s_{p,2}} + sup_t ||rot||_kappa); the
// product of sups is the true sup because the two frequencies are
// incommensurate (or beta = 0).
class Forcing {
 public:
  Forcing() = default;
  Forcing(const ForcingSpec& spec, const NormParams& params);

  SpectralField operator()(double t) const;
  SpectralField rotating_part(double t) const;
  double modulation(double t) const;

  const ForcingSpec& spec() const { return spec_; }
  double omega() const;
  double norm_L() const { return norm_L_; }
  double scale() const { return scale_; }
  bool zero() const { return zero_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const GridSpec& grid() const { return spec_.profile.grid(); }

  // Closed-form candidate limit along t_n = k_n T with k_n = residue (mod M)
  // and Omega t_n -> phase (mod 2 pi):
  //   g(t) = R_Q^{residue - 1} rot(t) (1 + beta cos(Omega t + phase)).
  SpectralField candidate_limit(double t, int residue, double phase) const;

 private:
  ForcingSpec spec_;
  std::vector<SpectralField> turns_;  // R_Q^j g, scaled
  int order_ = 1;
  double scale_ = 1.0;
  double norm_L_ = 0.0;
  bool zero_ = true;
  std::vector<std::string> warnings_;
};

// Band-limited random profile with unit L^2 norm on k_lo <= |k| <= k_hi.
SpectralField make_profile(const GridSpec& g, double k_lo, double k_hi, std::uint64_t seed);

Forcing make_rotating_periodic(ForcingSpec spec, const NormParams& params);
Forcing make_spiral_almost_periodic(ForcingSpec spec, const NormParams& params);
Forcing make_spiral_almost_automorphic(ForcingSpec spec, const NormParams& params);
Forcing make_forcing(const ForcingSpec& spec, const NormParams& params);

// Largest eta with dist(ratio k, Z) < eta guaranteeing a relative residual
// 2|beta| |sin(pi ratio k)| / (1 + |beta|) below epsilon.
double return_tolerance(double beta, double epsilon);

// Inclusion length in candidate shifts: the smallest N such that every run of
// N consecutive k = residue + M j has dist(ratio k, Z) < eta. Uses the gap
// structure of {j M ratio mod 1}; returns -1 if N exceeds `limit`.
long predicted_inclusion_length(double ratio, int order, double eta, long limit = 100000);

}  // namespace rnse
