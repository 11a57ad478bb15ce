#include "rnse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rnse/error.hpp"
#include "rnse/fft.hpp"
#include "rnse/operators.hpp"

namespace rnse {
namespace {

constexpr double kResolved = 1e-12;

long floor_div(long i, long m) { return i >= 0 ? i / m : -((-i + m - 1) / m); }

SpectralField turn(const SpectralField& u, const AffineSpec& a, long k) {
  const int q = static_cast<int>(((k % 4) + 4) % 4);
  if (q == 0 || a.quarter_turns() == 0) return u;
  return rotate_field(u, a, q);
}

double orbit_distance(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b,
                      const NormParams& params) {
  Trajectory d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.times.push_back(static_cast<double>(i));
    d.fields.push_back(a[i] - b[i]);
  }
  return solution_norm_X(d, params);
}

double orbit_norm(const std::vector<SpectralField>& a, const NormParams& params) {
  Trajectory t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    t.times.push_back(static_cast<double>(i));
    t.fields.push_back(a[i]);
  }
  return solution_norm_X(t, params);
}

bool all_finite(const std::vector<SpectralField>& a) {
  for (const auto& f : a)
    for (const auto& c : f.coeffs())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

// Taylor sums for phi_1, phi_2 near z = 0 where the closed forms cancel.
Complex phi1(Complex z) {
  if (std::abs(z) < 0.1) {
    Complex term = 1.0, sum = 0.0;
    for (int k = 1; k <= 12; ++k) {
      sum += term;
      term *= z / static_cast<double>(k + 1);
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

Complex phi2(Complex z) {
  if (std::abs(z) < 0.1) {
    Complex term = 0.5, sum = 0.0;
    for (int k = 1; k <= 12; ++k) {
      sum += term;
      term *= z / static_cast<double>(k + 2);
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

}  // namespace

void SolverConfig::validate() const {
  require(m_steps >= 2, "solver: m_steps must be >= 2");
  require(history_periods >= 1, "solver: history_periods must be >= 1");
  require(picard_tol > 0.0 && picard_tol < 1.0, "solver: picard_tol must lie in (0, 1)");
  require(max_iters >= 1, "solver: max_iters must be >= 1");
  require(min_iters >= 1 && min_iters <= max_iters, "solver: need 1 <= min_iters <= max_iters");
  require(coriolis.alpha == 0.0, "solver: alpha != 0 solves are not supported");
  require(std::isfinite(coriolis.l), "solver: l must be finite");
  params.validate();
}

double SolverConfig::tail_bound(const GridSpec& g, double period_T) const {
  return std::exp(-g.k_min() * g.k_min() * history_periods * period_T);
}

void SolverConfig::validate_tail(const GridSpec& g, double period_T) const {
  const double tail = tail_bound(g, period_T);
  if (tail >= picard_tol / 10.0) {
    std::ostringstream os;
    os << "solver: history tail e^{-k_min^2 K T} = " << tail << " is not below picard_tol/10 = "
       << picard_tol / 10.0 << "; raise history_periods";
    throw ValidationError(os.str());
  }
}

void check_closure(const OrbitSamples& v, const SolverConfig& cfg) {
  require(v.m_steps == cfg.m_steps && static_cast<int>(v.snapshots.size()) == v.m_steps,
          "orbit: snapshot count does not match m_steps");
  require(v.affine.exact(), "orbit: rotating extension needs a lattice-exact angle");
  const GridSpec& g = v.snapshots.front().grid();
  for (const auto& s : v.snapshots) {
    require(s.grid() == g && s.ncomp() == 3, "orbit: snapshots on different grids");
    require(s.mean_free(), "orbit: snapshot is not mean-free");
    const double dd = divergence_defect(s);
    require(dd <= 1e-10, "orbit: closure violated, divergence defect " + std::to_string(dd));
  }
}

Trajectory duhamel_trajectory(const OrbitSamples& v, const FieldFn& f, const SolverConfig& cfg,
                              long count, DuhamelPart part) {
  cfg.validate();
  check_closure(v, cfg);
  require(count >= 1, "duhamel: count must be >= 1");
  const GridSpec& g = v.snapshots.front().grid();
  const long m = v.m_steps;
  const long K = cfg.history_periods;
  const long J = K * m;
  const double dt = v.dt();
  const AffineSpec& aff = v.affine;

  // Sources on one period; F_{r + km} = R^k F_r.
  std::vector<SpectralField> F;
  F.reserve(m);
  for (long r = 0; r < m; ++r) {
    SpectralField fr = helmholtz_project(f(r * dt));
    require(fr.grid() == g, "duhamel: forcing grid differs from the orbit grid");
    if (part == DuhamelPart::kFull) fr -= nonlinear_term(v.snapshots[r]);
    F.push_back(std::move(fr));
  }

  const ModeMultiplier step = ModeMultiplier::semigroup(g, cfg.coriolis, dt);
  const ModeMultiplier span = ModeMultiplier::semigroup(g, cfg.coriolis, J * dt);
  const ModeMultiplier span1 = ModeMultiplier::semigroup(g, cfg.coriolis, (J + 1) * dt);

  // A_i = sum_{i0 <= j <= i} T((i-j)dt) F_j, carried as R^{-k(i)} A_i so that
  // a rotation is needed only when i crosses a period boundary.
  const long i0 = -J - 1;
  auto block = [&](long i) { return floor_div(i, m); };
  auto slot = [&](long i) { return i - block(i) * m; };
  std::vector<SpectralField> early;
  early.reserve(count);
  SpectralField acc = F[slot(i0)];
  early.push_back(acc);
  Trajectory out;
  SpectralField tmp(g);
  for (long i = i0 + 1; i < count; ++i) {
    step.apply(acc, tmp);
    if (block(i) != block(i - 1)) tmp = turn(tmp, aff, -1);
    tmp += F[slot(i)];
    std::swap(acc, tmp);
    if (i - i0 < count) early.push_back(acc);
    if (i < 0) continue;
    // trapezoid over j = i-J .. i: A_i - T((J+1)dt) A_{i-J-1} - F_i/2 - T(J dt) F_{i-J}/2
    const long ko = block(i - J - 1);
    SpectralField s = turn(acc, aff, block(i));
    const SpectralField old = turn(early[i - J - 1 - i0], aff, ko);
    span1.apply_add(old, -1.0, s);
    const SpectralField& fi = F[slot(i)];
    s.axpy(-0.5, turn(fi, aff, block(i)));
    span.apply_add(turn(fi, aff, block(i) - K), -0.5, s);
    s *= dt;
    pin_zero_mode(s);
    out.times.push_back(i * dt);
    out.fields.push_back(helmholtz_project(s));
  }
  return out;
}

OrbitSamples duhamel_map(const OrbitSamples& v, const FieldFn& f, const SolverConfig& cfg,
                         DuhamelPart part) {
  Trajectory w = duhamel_trajectory(v, f, cfg, v.m_steps, part);
  OrbitSamples out;
  out.period_T = v.period_T;
  out.m_steps = v.m_steps;
  out.affine = v.affine;
  out.snapshots = std::move(w.fields);
  return out;
}

OrbitSamples zero_orbit(const GridSpec& g, const AffineSpec& affine, int m_steps) {
  OrbitSamples o;
  o.period_T = affine.period_T;
  o.m_steps = m_steps;
  o.affine = affine;
  o.snapshots.assign(m_steps, SpectralField(g));
  return o;
}

OrbitSamples random_orbit(const GridSpec& g, const AffineSpec& affine, int m_steps,
                          double amplitude, std::uint64_t seed) {
  ForcingSpec spec;
  spec.profile = make_profile(g, 1.0, 2.0, seed);
  spec.delta = 0.0;
  spec.affine = affine;
  Forcing blend(spec, NormParams{});
  OrbitSamples o = zero_orbit(g, affine, m_steps);
  double sup = 0.0;
  for (int i = 0; i < m_steps; ++i) {
    o.snapshots[i] = blend(i * o.dt());
    sup = std::max(sup, l2_norm(o.snapshots[i]));
  }
  for (auto& s : o.snapshots) s *= amplitude / sup;
  return o;
}

SolveResult solve_rotating_periodic(const FieldFn& f, const AffineSpec& affine,
                                    const SolverConfig& cfg, const OrbitSamples* initial) {
  cfg.validate();
  affine.validate();
  require(affine.exact(), "solve: theta must be a multiple of pi/2");
  require(affine.alpha == 0.0, "solve: alpha != 0 is not supported");
  const SpectralField f0 = f(0.0);
  const GridSpec& g = f0.grid();
  cfg.validate_tail(g, affine.period_T);

  SolveResult res;
  ContractionReport& rep = res.report;
  rep.tail_bound = cfg.tail_bound(g, affine.period_T);

  OrbitSamples v = initial ? *initial : zero_orbit(g, affine, cfg.m_steps);
  v.period_T = affine.period_T;
  v.affine = affine;
  check_closure(v, cfg);

  Trajectory ft;
  const double dt = v.dt();
  for (int i = 0; i < cfg.m_steps; ++i) {
    ft.times.push_back(i * dt);
    ft.fields.push_back(f(i * dt));
  }
  rep.forcing_norm_L = forcing_norm_L(ft, cfg.params);
  Trajectory fk;
  const long nk = static_cast<long>(std::floor(cfg.params.N / dt + 1e-9));
  for (long i = -nk; i <= nk; ++i) {
    fk.times.push_back(i * dt);
    fk.fields.push_back(f(i * dt));
  }
  rep.forcing_norm_K = window_norm_K(fk, cfg.params.N, cfg.params);

  rep.norms.push_back(orbit_norm(v.snapshots, cfg.params));
  int above_one = 0;
  bool resolved = true;
  for (int it = 0; it < cfg.max_iters; ++it) {
    OrbitSamples w = duhamel_map(v, f, cfg);
    rep.iterations = it + 1;
    if (!all_finite(w.snapshots))
      throw DivergenceError("solve: non-finite iterate at iteration " + std::to_string(it + 1));
    const double d = orbit_distance(w.snapshots, v.snapshots, cfg.params);
    if (!std::isfinite(d)) throw DivergenceError("solve: non-finite increment");
    rep.increments.push_back(d);
    rep.norms.push_back(orbit_norm(w.snapshots, cfg.params));
    if (it >= 1) {
      const double prev = rep.increments[it - 1];
      const double rho = prev > 0.0 ? d / prev : 0.0;
      rep.ratios.push_back(rho);
      resolved = resolved && d > kResolved * rep.norms.back();
      if (resolved) rep.resolved_ratios = static_cast<int>(rep.ratios.size());
      above_one = rho >= 1.0 && d >= cfg.picard_tol ? above_one + 1 : 0;
      if (above_one >= 3) {
        std::ostringstream os;
        os << "solve: Picard ratio >= 1 for 3 consecutive iterations (last " << rho
           << ", increment " << d << "); forcing too large for contraction";
        throw DivergenceError(os.str());
      }
    }
    v = std::move(w);
    if (d < cfg.picard_tol) rep.converged = true;
    if (rep.converged && rep.iterations >= cfg.min_iters) break;
  }
  if (!rep.converged) {
    std::ostringstream os;
    os << "solve: no convergence in " << cfg.max_iters << " iterations (last increment "
       << rep.increments.back() << ")";
    throw NonConvergenceError(os.str());
  }
  rep.rho_final = rep.resolved_ratios > 0 ? rep.ratios[rep.resolved_ratios - 1] : 0.0;

  Trajectory ext = duhamel_trajectory(v, f, cfg, 2 * cfg.m_steps + 1);
  std::vector<SpectralField> once(ext.fields.begin(), ext.fields.begin() + cfg.m_steps);
  rep.fixed_point_residual = orbit_distance(once, v.snapshots, cfg.params);
  rep.rotating_residual = rotating_periodic_residual(ext, affine, cfg.params);
  res.orbit = std::move(v);
  return res;
}

SolveResult solve_rotating_periodic(const Forcing& f, const SolverConfig& cfg,
                                    const OrbitSamples* initial) {
  return solve_rotating_periodic([&f](double t) { return f(t); }, f.spec().affine, cfg, initial);
}

ContractionEstimates contraction_diagnostics(const ContractionReport& rep) {
  ContractionEstimates est;
  if (rep.forcing_norm_L == 0.0) return est;
  require(rep.iterations >= 4, "contraction_diagnostics: need at least 4 Picard iterations");
  const double fL = rep.forcing_norm_L;
  est.C2_hat = rep.norms.at(1) / fL;
  est.K_hat = rep.norms.back() / fL;
  // rho_n = d_n / d_{n-1} pairs with s_n = ||v_n|| + ||v_{n-1}||, n >= 1.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(rep.resolved_ratios); ++i) {
    const std::size_t n = i + 1;
    const double s = (rep.norms[n] + rep.norms[n - 1]) / fL;
    num += rep.ratios[i] * s;
    den += s * s;
  }
  est.C1_hat = den > 0.0 ? num / den : 0.0;
  est.two_C1K_hat = 2.0 * est.C1_hat * est.K_hat;
  return est;
}

MarchResult time_march(const FieldFn& f, const SpectralField& u0, double t_end,
                       const SolverConfig& cfg, const MarchOptions& opt) {
  require(opt.dt > 0.0 && opt.substeps >= 1, "time_march: need dt > 0 and substeps >= 1");
  require(t_end >= opt.t0, "time_march: t_end before t0");
  require(cfg.coriolis.alpha == 0.0, "time_march: alpha != 0 is not supported");
  require(u0.ncomp() == 3 && u0.mean_free() && divergence_defect(u0) <= 1e-10,
          "time_march: initial field must be div-free and mean-free");
  const GridSpec& g = u0.grid();
  const double h = opt.dt / opt.substeps;
  const CoriolisParams cp = cfg.coriolis;
  const ModeMultiplier E = ModeMultiplier::semigroup(g, cp, h);
  const ModeMultiplier P1(g, cp, [h](double kb2, double w) {
    return h * phi1(h * Complex(-kb2, w));
  });
  const ModeMultiplier P2(g, cp, [h](double kb2, double w) {
    return h * phi2(h * Complex(-kb2, w));
  });

  auto rhs = [&](const SpectralField& u, double t) {
    SpectralField n = helmholtz_project(f(t));
    n -= nonlinear_term(u);
    pin_zero_mode(n);
    return n;
  };

  MarchResult res;
  auto record = [&](const SpectralField& u, double t) {
    const double tol = 1e-9 * opt.dt;
    if (t < opt.keep_from - tol) return;
    if (!opt.keep_times.empty()) {
      auto it = std::lower_bound(opt.keep_times.begin(), opt.keep_times.end(), t - tol);
      if (it == opt.keep_times.end() || *it > t + tol) return;
    }
    res.trajectory.times.push_back(t);
    res.trajectory.fields.push_back(u);
    const PhysicalField up = to_physical(u);
    res.max_cfl = std::max(res.max_cfl, h * lp_norm(up, kInfinity) * g.k_max());
  };

  SpectralField u = u0;
  u.set_div_free(true);
  const long samples = std::lround((t_end - opt.t0) / opt.dt);
  record(u, opt.t0);
  double norm_u = l2_norm(u);
  for (long s = 0; s < samples; ++s) {
    for (int k = 0; k < opt.substeps; ++k) {
      const double t = opt.t0 + s * opt.dt + k * h;
      const SpectralField n0 = rhs(u, t);
      SpectralField a = E.apply(u);
      P1.apply_add(n0, 1.0, a);
      a.set_div_free(true);
      SpectralField n1 = rhs(a, t + h);
      n1 -= n0;
      P2.apply_add(n1, 1.0, a);
      pin_zero_mode(a);
      a.set_div_free(true);
      const double norm_a = l2_norm(a);
      const double push = 2.0 * h * l2_norm(n0);
      if (!std::isfinite(norm_a) || norm_a > 2.0 * norm_u + push) {
        std::ostringstream os;
        os << "time_march: blow-up at t = " << t + h << " (||u||_2 " << norm_u << " -> " << norm_a
           << ")";
        throw DivergenceError(os.str());
      }
      u = std::move(a);
      norm_u = norm_a;
      ++res.steps;
    }
    record(u, opt.t0 + (s + 1) * opt.dt);
  }
  if (res.max_cfl > 0.5) {
    std::ostringstream os;
    os << "time_march: advective CFL " << res.max_cfl << " exceeds 0.5";
    res.warnings.push_back(os.str());
  }
  return res;
}

}  // namespace rnse
