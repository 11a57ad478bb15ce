#include "rnse/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rnse/error.hpp"
#include "rnse/fft.hpp"
#include "rnse/operators.hpp"

namespace rnse {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

int mod4(long v) { return static_cast<int>(((v % 4) + 4) % 4); }

// Integer action of q quarter turns on (k1, k2): Q^q k.
void turn(int q, int k1, int k2, int& o1, int& o2) {
  switch (mod4(q)) {
    case 0: o1 = k1; o2 = k2; break;
    case 1: o1 = -k2; o2 = k1; break;
    case 2: o1 = -k1; o2 = -k2; break;
    default: o1 = k2; o2 = -k1; break;
  }
}

SpectralField rotate_exact(const SpectralField& u, int q) {
  const GridSpec& g = u.grid();
  SpectralField out(g, u.ncomp());
  q = mod4(q);
  if (q == 0) {
    out = u;
    return out;
  }
  const double c[4] = {1, 0, -1, 0};
  const double s[4] = {0, 1, 0, -1};
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3)) return;
    // out(k') = Q u(Q^-1 k')
    int k1, k2;
    turn(-q, g.wavenumber(i1), g.wavenumber(i2), k1, k2);
    const std::size_t src = g.flat(g.index_of(k1), g.index_of(k2), i3);
    const Complex a = u.at(0, src), b = u.at(1, src);
    out.at(0, idx) = c[q] * a - s[q] * b;
    out.at(1, idx) = s[q] * a + c[q] * b;
    for (int comp = 2; comp < u.ncomp(); ++comp) out.at(comp, idx) = u.at(comp, src);
  });
  return out;
}

SpectralField rotate_resampled(const SpectralField& u, double theta) {
  const GridSpec& g = u.grid();
  const int n = g.n;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double h = g.spacing();
  const double ku = g.k_unit();
  SpectralField out(g, 3);
  std::vector<Complex> plane(static_cast<std::size_t>(n) * n);
  std::vector<Complex> values(static_cast<std::size_t>(n) * n);
  for (int i3 = 0; i3 < n; ++i3) {
    for (int comp = 0; comp < 3; ++comp) {
      bool any = false;
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          plane[i1 * n + i2] = u.at(comp, g.flat(i1, i2, i3));
          any = any || plane[i1 * n + i2] != Complex(0.0);
        }
      if (!any) continue;
      // U(Q^-1 x) for every lattice x in this k3 plane
      for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2) {
          const double px = x1 * h, py = x2 * h;
          const double rx = ct * px + st * py, ry = -st * px + ct * py;
          Complex acc = 0.0;
          for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
              const Complex a = plane[i1 * n + i2];
              if (a == Complex(0.0)) continue;
              const double ph = ku * (g.wavenumber(i1) * rx + g.wavenumber(i2) * ry);
              acc += a * Complex(std::cos(ph), std::sin(ph));
            }
          values[x1 * n + x2] = acc;
        }
      // forward 2D DFT back onto the lattice, then mix components with Q
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          if (g.is_nyquist(i1) || g.is_nyquist(i2) || g.is_nyquist(i3)) continue;
          Complex acc = 0.0;
          for (int x1 = 0; x1 < n; ++x1)
            for (int x2 = 0; x2 < n; ++x2) {
              const double ph = -2.0 * std::numbers::pi * (double(i1) * x1 + double(i2) * x2) / n;
              acc += values[x1 * n + x2] * Complex(std::cos(ph), std::sin(ph));
            }
          acc /= double(n) * n;
          const std::size_t idx = g.flat(i1, i2, i3);
          if (comp == 0) {
            out.at(0, idx) += ct * acc;
            out.at(1, idx) += st * acc;
          } else if (comp == 1) {
            out.at(0, idx) += -st * acc;
            out.at(1, idx) += ct * acc;
          } else {
            out.at(2, idx) += acc;
          }
        }
    }
  }
  out.set_mean_free(u.mean_free());
  out.set_div_free(false);
  return out;
}

// The two terms of a composite norm, kept apart so window norms are sums of sups.
struct Parts {
  double a = 0.0, b = 0.0;
  void absorb(const Parts& o) {
    a = std::max(a, o.a);
    b = std::max(b, o.b);
  }
  double total() const { return a + b; }
};

Parts snapshot_parts(const SpectralField& f, const NormParams& params, NormKind kind) {
  if (kind == NormKind::kForcing)
    return {besov_norm(f, -params.s, params.p, 2.0, params.partition(f.grid())), lp_norm(f, params.kappa)};
  return {lp_norm(f, params.r), lp_norm(gradient(f, 1), params.q_sol)};
}

}  // namespace

void AffineSpec::validate() const {
  require(theta >= 0.0 && theta < 2.0 * std::numbers::pi, "affine: theta must lie in [0, 2 pi)");
  require(period_T > 0.0 && std::isfinite(period_T), "affine: T must be positive");
  require(std::isfinite(alpha), "affine: alpha must be finite");
}

bool AffineSpec::exact() const {
  const double q = theta / kHalfPi;
  return std::abs(q - std::round(q)) < 1e-12;
}

int AffineSpec::quarter_turns() const { return mod4(std::lround(theta / kHalfPi)); }

int AffineSpec::order() const {
  require(exact(), "affine: order is defined for lattice-exact angles only");
  const int q = quarter_turns();
  return q == 0 ? 1 : q == 2 ? 2 : 4;
}

Mat3 affine_matrix(const AffineSpec& spec) {
  const double e = std::exp(spec.alpha);
  const double c = std::cos(spec.theta), s = std::sin(spec.theta);
  Mat3 q{};
  q[0] = {e * c, -e * s, 0.0};
  q[1] = {e * s, e * c, 0.0};
  q[2] = {0.0, 0.0, 1.0};
  return q;
}

SpectralField rotate_field(const SpectralField& u, const AffineSpec& spec, int power,
                           RotationDiagnostics* diag) {
  require(u.ncomp() == 3, "rotate_field: needs a 3-component field");
  require(spec.alpha == 0.0, "rotate_field: scaled (alpha != 0) maps do not preserve the lattice");
  SpectralField out;
  RotationDiagnostics local;
  if (spec.exact()) {
    out = rotate_exact(u, spec.quarter_turns() * power);
  } else {
    out = rotate_resampled(u, spec.theta * power);
    local.exact = false;
    const double nu = l2_norm(u);
    local.l2_defect = nu > 0.0 ? std::abs(l2_norm(out) - nu) / nu : 0.0;
    std::ostringstream os;
    os << "rotation by " << spec.theta * power << " rad is not lattice-exact; resampled with L2 defect "
       << local.l2_defect;
    local.warning = os.str();
  }
  out.set_mean_free(u.mean_free());
  out.set_div_free(u.div_free() && spec.exact());
  if (diag) *diag = local;
  return out;
}

SpectralField OrbitSamples::at(long i) const {
  require(m_steps > 0 && static_cast<int>(snapshots.size()) == m_steps, "orbit: empty or inconsistent");
  const long k = i >= 0 ? i / m_steps : -((-i + m_steps - 1) / m_steps);
  const long r = i - k * m_steps;
  const SpectralField& base = snapshots[static_cast<std::size_t>(r)];
  if (k == 0) return base;
  return rotate_field(base, affine, static_cast<int>(k % 4));
}

Trajectory OrbitSamples::trajectory(long first, long count) const {
  Trajectory t;
  for (long i = first; i < first + count; ++i) {
    t.times.push_back(i * dt());
    t.fields.push_back(at(i));
  }
  return t;
}

SampledField::SampledField(const Trajectory& traj) : traj_(&traj) {
  require(!traj.times.empty() && traj.times.size() == traj.fields.size(), "trajectory: empty");
  count_ = static_cast<long>(traj.times.size());
  t0_ = traj.times.front();
  dt_ = count_ > 1 ? (traj.times.back() - t0_) / (count_ - 1) : 1.0;
  for (long i = 0; i < count_; ++i)
    require(std::abs(traj.times[i] - (t0_ + i * dt_)) <= 1e-9 * dt_, "trajectory: samples are not uniform");
}

bool SampledField::contains(double t) const {
  return t >= t0_ - 1e-9 * dt_ && t <= t_end() + 1e-9 * dt_;
}

const SpectralField& SampledField::at(double t) const {
  const double x = (t - t0_) / dt_;
  const long i = std::lround(x);
  require(std::abs(x - i) <= 1e-9 && i >= 0 && i < count_,
          "trajectory: t = " + std::to_string(t) + " is not a sample time");
  return traj_->fields[static_cast<std::size_t>(i)];
}

double rotating_periodic_residual(const Trajectory& traj, const AffineSpec& spec,
                                  const NormParams& params, double floor) {
  SampledField s(traj);
  const double T = spec.period_T;
  const double steps = T / s.dt();
  require(std::abs(steps - std::round(steps)) < 1e-9, "residual: T is not a multiple of the sample step");
  require(s.t_end() - s.t0() >= 2 * T - 1e-9 * s.dt(), "residual: trajectory must cover two periods");
  const double scale = std::max(solution_norm_X(traj, params), floor);
  Parts worst;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (!s.contains(t + T)) break;
    SpectralField d = s.at(t + T) - rotate_field(traj.fields[i], spec);
    worst.absorb(snapshot_parts(d, params, NormKind::kSolution));
  }
  return scale > 0.0 ? worst.total() / scale : 0.0;
}

ScanResult almost_period_scan(const FieldFn& f, const AffineSpec& spec, const NormParams& params,
                              double epsilon, double s_lo, double s_hi, double ds,
                              const std::vector<double>& window, NormKind kind,
                              double reference_norm) {
  require(ds > 0.0 && s_hi >= s_lo, "scan: empty scan range");
  require(!window.empty(), "scan: empty time window");
  require(epsilon >= 0.0, "scan: epsilon must be non-negative");
  ScanResult res;
  std::vector<SpectralField> rotated;
  Parts ref;
  for (double t : window) {
    const SpectralField ft = f(t);
    ref.absorb(snapshot_parts(ft, params, kind));
    rotated.push_back(rotate_field(ft, spec));
  }
  res.reference_norm = reference_norm > 0.0 ? reference_norm : ref.total();
  const long count = static_cast<long>(std::floor((s_hi - s_lo) / ds + 1e-9)) + 1;
  for (long j = 0; j < count; ++j) {
    const double s = s_lo + j * ds;
    Parts worst;
    for (std::size_t i = 0; i < window.size(); ++i)
      worst.absorb(snapshot_parts(f(s + window[i]) - rotated[i], params, kind));
    ScanPoint p;
    p.s = s;
    p.residual = res.reference_norm > 0.0 ? worst.total() / res.reference_norm : 0.0;
    p.hit = p.residual < epsilon;
    if (p.hit) res.hits.push_back(s);
    res.points.push_back(p);
  }
  if (res.hits.empty()) {
    res.largest_gap = s_hi - s_lo;
  } else {
    res.largest_gap = std::max(res.hits.front() - s_lo, s_hi - res.hits.back());
    for (std::size_t i = 1; i < res.hits.size(); ++i)
      res.largest_gap = std::max(res.largest_gap, res.hits[i] - res.hits[i - 1]);
  }
  return res;
}

double shift_residual(const FieldFn& f, const AffineSpec& spec, const NormParams& params, double s,
                      const std::vector<double>& window, NormKind kind) {
  require(!window.empty(), "shift residual: empty time window");
  Parts worst;
  for (double t : window) worst.absorb(snapshot_parts(f(s + t) - rotate_field(f(t), spec), params, kind));
  return worst.total();
}

std::string scan_csv(const ScanResult& scan) {
  std::ostringstream os;
  os.precision(17);
  os << "s,residual_L,hit\n";
  for (const auto& p : scan.points) os << p.s << "," << p.residual << "," << (p.hit ? "true" : "false") << "\n";
  return os.str();
}

LimitReport automorphic_limit_check(const FieldFn& u, const std::vector<double>& sequence,
                                    const FieldFn& candidate, const AffineSpec& spec,
                                    const NormParams& params, const std::vector<double>& window,
                                    NormKind kind) {
  require(static_cast<bool>(candidate), "limit check: a candidate limit is required");
  require(!sequence.empty(), "limit check: empty sequence");
  require(!window.empty(), "limit check: empty time window");
  LimitReport rep;
  rep.sequence = sequence;
  for (double tn : sequence) {
    Parts fwd, bwd;
    for (double t : window) {
      fwd.absorb(snapshot_parts(u(t + tn) - rotate_field(candidate(t), spec), params, kind));
      bwd.absorb(snapshot_parts(candidate(t - tn) - rotate_field(u(t), spec, -1), params, kind));
    }
    rep.forward.push_back(fwd.total());
    rep.backward.push_back(bwd.total());
  }
  for (std::size_t i = 1; i < rep.forward.size(); ++i)
    if (rep.forward[i] > rep.forward[i - 1]) ++rep.inversions;
  rep.monotone = rep.inversions <= 1;
  rep.last_forward = rep.forward.back();
  rep.last_backward = rep.backward.back();
  return rep;
}

}  // namespace rnse
