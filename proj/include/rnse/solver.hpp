#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnse/field.hpp"
#include "rnse/forcing.hpp"
#include "rnse/littlewood_paley.hpp"
#include "rnse/semigroup.hpp"
#include "rnse/symmetry.hpp"

namespace rnse {

struct SolverConfig {
  CoriolisParams coriolis{1.0, 0.0};
  int m_steps = 32;
  // History integral truncated at depth history_periods * T.
  int history_periods = 30;
  double picard_tol = 1e-12;
  int max_iters = 60;
  // Keep iterating to this count even after the tolerance is met, so the
  // contraction fit has enough ratios.
  int min_iters = 4;
  NormParams params;

  // Rejects bad counts, a tolerance outside (0, 1) and alpha != 0.
  void validate() const;
  // e^{-k_min^2 K T}; validate_tail() requires it below picard_tol / 10.
  double tail_bound(const GridSpec& g, double period_T) const;
  void validate_tail(const GridSpec& g, double period_T) const;
};

enum class DuhamelPart { kFull, kLinear };

// Checks that an orbit has m snapshots on one grid, each mean-free and
// divergence-free to 1e-10 (relative).
void check_closure(const OrbitSamples& v, const SolverConfig& cfg);

// w(t_i) = int_{t_i - K T}^{t_i} T(t_i - tau) P[f - (v.grad)v](tau) dtau for
// i = 0 .. count-1, composite trapezoid on the sample grid. History values come
// from the rotating extension of v and f(t + kT) = R_Q^k f(t) is assumed for
// the forcing samples. kLinear drops the convection term.
Trajectory duhamel_trajectory(const OrbitSamples& v, const FieldFn& f, const SolverConfig& cfg,
                              long count, DuhamelPart part = DuhamelPart::kFull);

// One application of the map on one period.
OrbitSamples duhamel_map(const OrbitSamples& v, const FieldFn& f, const SolverConfig& cfg,
                         DuhamelPart part = DuhamelPart::kFull);

struct ContractionReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> increments;  // d_n = ||v_{n+1} - v_n||_X
  std::vector<double> ratios;      // d_n / d_{n-1}
  // Leading ratios whose numerator is above 1e-12 ||v||_X; later ones are
  // round-off and are left out of rho_final and the C1 fit.
  int resolved_ratios = 0;
  std::vector<double> norms;       // ||v_n||_X, n = 0 .. iterations
  double rho_final = 0.0;
  double fixed_point_residual = 0.0;  // ||v - map(v)||_X at the returned orbit
  double rotating_residual = 0.0;     // of map(v) evaluated directly on [0, 2T]
  double tail_bound = 0.0;
  double forcing_norm_L = 0.0;
  double forcing_norm_K = 0.0;
};

struct SolveResult {
  OrbitSamples orbit;
  ContractionReport report;
};

// Picard iteration v_{n+1} = map(v_n) from `initial` (zero when null) until
// the X increment drops below picard_tol and min_iters is reached. Throws
// DivergenceError after three consecutive ratios >= 1 or a non-finite
// iterate, NonConvergenceError when max_iters runs out.
SolveResult solve_rotating_periodic(const FieldFn& f, const AffineSpec& affine,
                                    const SolverConfig& cfg, const OrbitSamples* initial = nullptr);
SolveResult solve_rotating_periodic(const Forcing& f, const SolverConfig& cfg,
                                    const OrbitSamples* initial = nullptr);

struct ContractionEstimates {
  double C1_hat = 0.0;
  double C2_hat = 0.0;
  double K_hat = 0.0;
  double two_C1K_hat = 0.0;
};

// Empirical constants in the scaling v -> v / ||f||_L:
//   C2_hat = ||v_1||_X / ||f||_L, K_hat = ||v*||_X / ||f||_L,
//   C1_hat from the fit rho_n ~ C1 (||v_n|| + ||v_{n-1}||) / ||f||_L.
// Zero forcing gives zeros; otherwise at least 4 iterations are required.
ContractionEstimates contraction_diagnostics(const ContractionReport& report);

// Smooth rotating-periodic orbit built from a random band-limited profile,
// scaled to the given L^2 sup. Used as a second Picard start.
OrbitSamples random_orbit(const GridSpec& g, const AffineSpec& affine, int m_steps,
                          double amplitude, std::uint64_t seed);

OrbitSamples zero_orbit(const GridSpec& g, const AffineSpec& affine, int m_steps);

struct MarchOptions {
  double dt = 1.0 / 32;  // output sample spacing
  int substeps = 2;      // integrator steps per output sample
  double t0 = 0.0;
  // Keep output samples from this time on (earlier ones are spin-up).
  double keep_from = 0.0;
  // When non-empty (sorted), keep only the samples at these times.
  std::vector<double> keep_times;
};

struct MarchResult {
  Trajectory trajectory;
  double max_cfl = 0.0;  // h * max|u| * k_max over the output samples
  long steps = 0;
  std::vector<std::string> warnings;
};

// ETD2RK integration of u' = L u + P[f - (u.grad)u] with exact
// Stokes-Coriolis propagators:
//   a = e^{hL} u_n + h phi1(hL) N_n,  u_{n+1} = a + h phi2(hL) (N(a) - N_n).
// Throws DivergenceError when ||u||_2 more than doubles in one step beyond
// the forcing increment, or goes non-finite.
MarchResult time_march(const FieldFn& f, const SpectralField& u0, double t_end,
                       const SolverConfig& cfg, const MarchOptions& opt);

}  // namespace rnse
