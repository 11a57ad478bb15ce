#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rnse/field.hpp"
#include "rnse/littlewood_paley.hpp"

namespace rnse {

// Affine data (Q, T): Q rotates by theta about e3 and scales the horizontal
// plane by e^alpha. Field rotations require alpha = 0.
struct AffineSpec {
  double theta = 0.0;
  double alpha = 0.0;
  double period_T = 1.0;

  void validate() const;
  // theta is a multiple of pi/2 (to 1e-12), so the lattice maps onto itself.
  bool exact() const;
  // theta / (pi/2) mod 4 for exact angles.
  int quarter_turns() const;
  // Smallest M >= 1 with Q^M = I for exact angles (1, 2 or 4).
  int order() const;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

// Q itself, including the e^alpha scaling of the horizontal block.
Mat3 affine_matrix(const AffineSpec& spec);

struct RotationDiagnostics {
  bool exact = true;
  // | ||R_Q u||_2 - ||u||_2 | / ||u||_2 after resampling (0 for exact angles).
  double l2_defect = 0.0;
  std::string warning;
};

// (R_Q u)(x) = Q u(Q^-1 x). Exact angles permute coefficients and mix
// components; other angles evaluate the trigonometric interpolant at the
// rotated points plane by plane in k3, which is not exact because the rotated
// field is no longer box-periodic. Any number of turns via `power`
// (negative powers rotate backwards).
SpectralField rotate_field(const SpectralField& u, const AffineSpec& spec, int power = 1,
                           RotationDiagnostics* diag = nullptr);

// One period of a time-sampled orbit, t_i = i T / m for i = 0..m-1. Samples
// outside the period follow u(t + kT) = R_Q^k u(t).
struct OrbitSamples {
  double period_T = 1.0;
  int m_steps = 0;
  std::vector<SpectralField> snapshots;
  AffineSpec affine;

  double dt() const { return period_T / m_steps; }
  // Snapshot at time i * dt for any integer i.
  SpectralField at(long i) const;
  // Samples i = first .. first + count - 1 as a trajectory.
  Trajectory trajectory(long first, long count) const;
};

// Look-up of a uniformly sampled trajectory at exact sample times.
class SampledField {
 public:
  explicit SampledField(const Trajectory& traj);
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double t_end() const { return t0_ + dt_ * (count_ - 1); }
  bool contains(double t) const;
  // Throws ValidationError when t is not (to 1e-9 dt) a sample time.
  const SpectralField& at(double t) const;

 private:
  const Trajectory* traj_;
  double t0_ = 0.0, dt_ = 1.0;
  long count_ = 0;
};

using FieldFn = std::function<SpectralField(double)>;

// ||u(. + T) - R_Q u(.)||_X / max(||u||_X, floor) over the samples of a
// uniformly sampled trajectory spanning at least [t0, t0 + 2T].
double rotating_periodic_residual(const Trajectory& traj, const AffineSpec& spec,
                                  const NormParams& params, double floor = 1e-300);

enum class NormKind { kForcing, kSolution };

struct ScanPoint {
  double s = 0.0;
  double residual = 0.0;  // relative to the norm of f over the window
  bool hit = false;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::vector<double> hits;
  double largest_gap = 0.0;  // between consecutive hits, and from range ends
  double reference_norm = 0.0;
};

// Residuals ||f(s + .) - R_Q f(.)|| / ||f|| for s = s_lo, s_lo + ds, ..., <= s_hi.
// Window norms are sums of per-term sups over t in `window`. The reference
// norm defaults to the window norm of f itself. Hits are residuals below epsilon.
ScanResult almost_period_scan(const FieldFn& f, const AffineSpec& spec, const NormParams& params,
                              double epsilon, double s_lo, double s_hi, double ds,
                              const std::vector<double>& window, NormKind kind = NormKind::kForcing,
                              double reference_norm = 0.0);

// Absolute residual ||f(s + .) - R_Q f(.)|| at one shift, sums of per-term
// sups over the window.
double shift_residual(const FieldFn& f, const AffineSpec& spec, const NormParams& params, double s,
                      const std::vector<double>& window, NormKind kind);

// CSV with header "s,residual_L,hit".
std::string scan_csv(const ScanResult& scan);

struct LimitReport {
  std::vector<double> sequence;
  std::vector<double> forward;   // sup_t ||u(t + t_n) - R_Q v(t)||
  std::vector<double> backward;  // sup_t ||v(t - t_n) - R_Q^-1 u(t)||
  int inversions = 0;            // increases in `forward`
  bool monotone = true;          // at most one inversion
  double last_forward = 0.0;
  double last_backward = 0.0;
};

// Distances along a sequence between shifted u and the rotated candidate
// limit v, absolute (not normalised). Rejects a missing candidate or an
// empty sequence.
LimitReport automorphic_limit_check(const FieldFn& u, const std::vector<double>& sequence,
                                    const FieldFn& candidate, const AffineSpec& spec,
                                    const NormParams& params, const std::vector<double>& window,
                                    NormKind kind);

}  // namespace rnse
