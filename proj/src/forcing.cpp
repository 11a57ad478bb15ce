#include "rnse/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rnse/error.hpp"
#include "rnse/operators.hpp"

namespace rnse {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string to_string(ForcingKind k) {
  switch (k) {
    case ForcingKind::kRotatingPeriodic: return "rotating_periodic";
    case ForcingKind::kSpiralAlmostPeriodic: return "spiral_almost_periodic";
    default: return "spiral_almost_automorphic";
  }
}

ForcingKind forcing_kind_from_string(const std::string& s) {
  if (s == "rotating_periodic") return ForcingKind::kRotatingPeriodic;
  if (s == "spiral_almost_periodic") return ForcingKind::kSpiralAlmostPeriodic;
  if (s == "spiral_almost_automorphic") return ForcingKind::kSpiralAlmostAutomorphic;
  throw ValidationError("forcing: unknown kind '" + s + "'");
}

Forcing::Forcing(const ForcingSpec& spec, const NormParams& params) : spec_(spec) {
  spec_.affine.validate();
  const SpectralField& g = spec_.profile;
  require(g.ncomp() == 3, "forcing: profile must be a 3-component field");
  require(g.mean_free() && g.div_free() && divergence_residual(g) <= 1e-10,
          "forcing: profile must be div-free and mean-free");
  require(spec_.norm_samples >= 1, "forcing: norm_samples must be positive");
  if (spec_.kind == ForcingKind::kRotatingPeriodic) {
    require(spec_.beta == 0.0, "forcing: rotating-periodic forcing has no modulation (beta = 0)");
  } else if (spec_.beta != 0.0) {
    require(spec_.frequency_ratio > 0.0, "forcing: modulated kinds need frequency_ratio > 0");
  }
  const double ratio = spec_.frequency_ratio;
  if (spec_.beta != 0.0 && std::abs(ratio - std::round(ratio)) < 1e-12)
    warnings_.push_back("frequency ratio is an integer; the modulation is then exactly periodic");

  if (spec_.affine.exact()) {
    order_ = spec_.affine.order();
    for (int j = 0; j < order_; ++j) turns_.push_back(rotate_field(g, spec_.affine, j));
  } else {
    order_ = 1;
    turns_.push_back(g);
    RotationDiagnostics diag;
    rotate_field(g, spec_.affine, 1, &diag);
    warnings_.push_back(diag.warning);
  }

  // sup over one period of the rotation blend; norms are rotation invariant
  double sup_b = 0.0, sup_k = 0.0;
  const int ns = spec_.norm_samples;
  for (int i = 0; i < ns; ++i) {
    const SpectralField r = rotating_part(spec_.affine.period_T * i / ns);
    sup_b = std::max(sup_b, besov_norm(r, -params.s, params.p, 2.0, params.partition(r.grid())));
    sup_k = std::max(sup_k, lp_norm(r, params.kappa));
  }
  const double raw = (1.0 + std::abs(spec_.beta)) * (sup_b + sup_k);
  zero_ = raw == 0.0;
  if (spec_.delta > 0.0 && raw > 0.0) {
    scale_ = spec_.delta / raw;
    for (auto& t : turns_) t *= scale_;
    norm_L_ = spec_.delta;
  } else {
    norm_L_ = raw;
  }
}

double Forcing::omega() const { return kTwoPi * spec_.frequency_ratio / spec_.affine.period_T; }

double Forcing::modulation(double t) const { return 1.0 + spec_.beta * std::cos(omega() * t); }

SpectralField Forcing::rotating_part(double t) const {
  const double T = spec_.affine.period_T;
  if (!spec_.affine.exact()) {
    AffineSpec a = spec_.affine;
    a.theta = std::fmod(spec_.affine.theta * t / T, kTwoPi);
    if (a.theta < 0) a.theta += kTwoPi;
    return rotate_field(turns_.front(), a);
  }
  if (order_ == 1) return turns_.front();
  SpectralField out(grid(), 3);
  for (int j = 0; j < order_; ++j) {
    const double w = (1.0 + std::cos(kTwoPi * (t - j * T) / (order_ * T))) / order_;
    out.axpy(w, turns_[j]);
  }
  out.set_mean_free(true);
  out.set_div_free(true);
  return out;
}

SpectralField Forcing::operator()(double t) const {
  SpectralField r = rotating_part(t);
  if (spec_.beta != 0.0) r *= modulation(t);
  return r;
}

SpectralField Forcing::candidate_limit(double t, int residue, double phase) const {
  SpectralField r = rotating_part(t);
  if (spec_.beta != 0.0) r *= 1.0 + spec_.beta * std::cos(omega() * t + phase);
  const int turns = residue - 1;
  if (turns % order_ == 0) return r;
  return rotate_field(r, spec_.affine, turns);
}

SpectralField make_profile(const GridSpec& g, double k_lo, double k_hi, std::uint64_t seed) {
  RandomFieldOptions opt;
  opt.k_lo = k_lo;
  opt.k_hi = k_hi;
  opt.seed = seed;
  opt.dealiased = true;
  return random_solenoidal_field(g, opt);
}

Forcing make_rotating_periodic(ForcingSpec spec, const NormParams& params) {
  spec.kind = ForcingKind::kRotatingPeriodic;
  return Forcing(spec, params);
}

Forcing make_spiral_almost_periodic(ForcingSpec spec, const NormParams& params) {
  spec.kind = ForcingKind::kSpiralAlmostPeriodic;
  return Forcing(spec, params);
}

Forcing make_spiral_almost_automorphic(ForcingSpec spec, const NormParams& params) {
  spec.kind = ForcingKind::kSpiralAlmostAutomorphic;
  return Forcing(spec, params);
}

Forcing make_forcing(const ForcingSpec& spec, const NormParams& params) { return Forcing(spec, params); }

double return_tolerance(double beta, double epsilon) {
  if (beta == 0.0) return 0.5;
  const double x = epsilon * (1.0 + std::abs(beta)) / (2.0 * std::abs(beta));
  if (x >= 1.0) return 0.5;
  return std::asin(x) / std::numbers::pi;
}

long predicted_inclusion_length(double ratio, int order, double eta, long limit) {
  require(eta > 0.0, "inclusion length: eta must be positive");
  if (eta >= 0.5) return 1;
  const double gamma = std::fmod(order * ratio, 1.0);
  std::vector<double> pts;
  for (long n = 1; n <= limit; ++n) {
    const double x = std::fmod((n - 1) * gamma, 1.0);
    pts.insert(std::upper_bound(pts.begin(), pts.end(), x), x);
    double gap = 1.0 - pts.back() + pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, pts[i] - pts[i - 1]);
    if (gap < 2.0 * eta) return n;
  }
  return -1;
}

}  // namespace rnse
