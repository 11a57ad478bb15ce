#include "rnse/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rnse/error.hpp"
#include "rnse/operators.hpp"
#include "rnse/semigroup.hpp"

namespace rnse {
namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ojson named(const Named& n) {
  ojson o = ojson::object();
  for (const auto& [k, v] : n) o[k] = number(v);
  return o;
}

ojson report_json(const EstimateReport& r) {
  ojson o;
  o["id"] = r.id;
  o["parameters"] = named(r.parameters);
  o["results"] = named(r.results);
  o["verdict"] = to_string(r.verdict);
  o["warnings"] = r.warnings;
  ojson cols = ojson::object();
  for (std::size_t c = 0; c < r.column_names.size(); ++c) {
    ojson arr = ojson::array();
    for (double v : r.columns[c]) arr.push_back(number(v));
    cols[r.column_names[c]] = arr;
  }
  o["columns"] = cols;
  ojson vars = ojson::array();
  for (const auto& v : r.variants) vars.push_back(report_json(v));
  o["variants"] = vars;
  return o;
}

void check_t_grid(const std::vector<double>& t) {
  require(t.size() >= 3, "decay: need at least 3 sample times");
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(t[i] > 0.0 && std::isfinite(t[i]), "decay: sample times must be positive");
    if (i > 0) require(t[i] > t[i - 1], "decay: sample times must increase");
  }
}

void check_data(const SpectralField& d) {
  require(d.ncomp() == 3 && d.mean_free(), "decay: data must be a mean-free vector field");
  require(divergence_defect(d) <= 1e-10, "decay: data must be divergence-free");
}

// Slope verdict on [lo, hi]; inconclusive for a poor fit or a window reaching
// into the exponential regime past 1/k_min^2.
EstimateReport slope_report(const std::string& id, Named params, const std::vector<double>& t,
                            const std::vector<double>& norms, double theory, double lo, double hi,
                            const GridSpec& g) {
  EstimateReport r;
  r.id = id;
  r.parameters = std::move(params);
  std::vector<double> lt, ln;
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(norms[i] > 0.0 && std::isfinite(norms[i]), "decay: norm vanished or is not finite");
    lt.push_back(std::log(t[i]));
    ln.push_back(std::log(norms[i]));
  }
  const LineFit fit = fit_line(lt, ln);
  const double regime_lo = 1.0 / (g.k_max() * g.k_max());
  const double regime_hi = 1.0 / (g.k_min() * g.k_min());
  r.results = {{"slope", fit.slope},
               {"intercept", fit.intercept},
               {"r_squared", fit.r_squared},
               {"theory_slope", theory},
               {"accept_lo", lo},
               {"accept_hi", hi},
               {"window_lo", t.front()},
               {"window_hi", t.back()},
               {"regime_lo", regime_lo},
               {"regime_hi", regime_hi}};
  r.column_names = {"t", "norm", "log_t", "log_norm", "fit_residual"};
  r.columns = {t, norms, lt, ln, fit.residuals};
  bool inconclusive = false;
  if (fit.r_squared < 0.9) {
    r.warnings.push_back("R^2 below 0.9; no verdict");
    inconclusive = true;
  }
  if (t.back() > regime_hi) {
    std::ostringstream os;
    os << "window [" << t.front() << ", " << t.back() << "] reaches past 1/k_min^2 = " << regime_hi
       << " where decay is exponential";
    r.warnings.push_back(os.str());
    inconclusive = true;
  }
  if (t.front() < regime_lo) {
    std::ostringstream os;
    os << "window starts below 1/k_max^2 = " << regime_lo << "; truncation may bias the slope";
    r.warnings.push_back(os.str());
  }
  if (inconclusive) {
    r.verdict = Verdict::kInconclusive;
  } else {
    r.verdict = fit.slope >= lo && fit.slope <= hi ? Verdict::kPass : Verdict::kFail;
  }
  return r;
}

SpectralField fractional_power(const SpectralField& u, double s) {
  const GridSpec& g = u.grid();
  SpectralField out = u;
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    const auto k = wavevector(g, i1, i2, i3);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const double w = idx == 0 ? 0.0 : std::pow(k2, s);
    for (int c = 0; c < u.ncomp(); ++c) out.at(c, idx) *= w;
  });
  return out;
}

struct Fit2 {
  double a = 0.0, b = 0.0;
};

// Relative least squares for y = a x1 + b x2 with a, b >= 0.
Fit2 nnls2(const std::vector<double>& y, const std::vector<double>& x1, const std::vector<double>& x2) {
  double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = x1[i] / y[i], v = x2[i] / y[i];
    s11 += u * u;
    s12 += u * v;
    s22 += v * v;
    s1y += u;
    s2y += v;
  }
  auto cost = [&](const Fit2& f) {
    double c = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = (f.a * x1[i] + f.b * x2[i] - y[i]) / y[i];
      c += e * e;
    }
    return c;
  };
  std::vector<Fit2> cands;
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) > 1e-300) {
    Fit2 f{(s1y * s22 - s2y * s12) / det, (s2y * s11 - s1y * s12) / det};
    if (f.a >= 0.0 && f.b >= 0.0) cands.push_back(f);
  }
  if (s11 > 0.0) cands.push_back({s1y / s11, 0.0});
  if (s22 > 0.0) cands.push_back({0.0, s2y / s22});
  cands.push_back({0.0, 0.0});
  return *std::min_element(cands.begin(), cands.end(),
                           [&](const Fit2& p, const Fit2& q) { return cost(p) < cost(q); });
}

std::string level_key(const char* prefix, double eps) {
  std::ostringstream os;
  os << prefix << eps;
  return os.str();
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 3, "fit: need at least 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "fit: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    f.residuals.push_back(e);
    ssr += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

std::vector<double> log_time_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi > lo && count >= 2, "time grid: need 0 < lo < hi and count >= 2");
  std::vector<double> t;
  for (int i = 0; i < count; ++i) t.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return t;
}

double EstimateReport::result(const std::string& key) const {
  for (const auto& [k, v] : results)
    if (k == key) return v;
  throw ValidationError("report " + id + ": no result '" + key + "'");
}

bool EstimateReport::has_result(const std::string& key) const {
  return std::any_of(results.begin(), results.end(), [&](const auto& kv) { return kv.first == key; });
}

Verdict combined_verdict(const EstimateReport& r) {
  bool failed = r.verdict == Verdict::kFail;
  for (const auto& v : r.variants) failed = failed || combined_verdict(v) == Verdict::kFail;
  return failed ? Verdict::kFail : r.verdict;
}

std::string to_json(const EstimateReport& r) { return report_json(r).dump(2) + "\n"; }

std::string to_csv(const EstimateReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t c = 0; c < r.column_names.size(); ++c) os << (c ? "," : "") << r.column_names[c];
  os << "\n";
  const std::size_t rows = r.columns.empty() ? 0 : r.columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c][i];
    os << "\n";
  }
  return os.str();
}

EstimateReport check_lp_lq_decay(double p, double q, int m, double l, double alpha,
                                 const SpectralField& data, const DecayOptions& opt) {
  require(p >= 1.0 && p <= 2.0 && q >= 2.0, "decay: need 1 <= p <= 2 <= q <= inf");
  require(m >= 0 && m <= 2, "decay: m must be 0, 1 or 2");
  require(opt.slope_tol > 0.0, "decay: slope_tol must be positive");
  check_t_grid(opt.t_grid);
  check_data(data);
  const GridSpec& g = data.grid();
  const double gap = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  const double theory = -0.5 * m - 1.5 * gap + 0.0;
  // p = q = 2, m = 0 is the contraction case: the norm cannot grow.
  const bool contraction = m == 0 && p == 2.0 && q == 2.0;
  const double lo = contraction ? -opt.slope_tol : theory - opt.slope_tol;
  const double hi = contraction ? 0.0 : theory + opt.slope_tol;

  auto series = [&](bool adjoint) {
    std::vector<double> out;
    for (double t : opt.t_grid) {
      CoriolisSymbolParams sp;
      sp.l = l;
      sp.alpha = alpha;
      sp.t = t;
      const SpectralField u = adjoint ? apply_adjoint_semigroup(data, sp) : apply_semigroup(data, sp);
      out.push_back(lp_norm(m == 0 ? u : gradient(u, m), q));
    }
    return out;
  };
  std::ostringstream id;
  id << "lp_lq_decay(p=" << p << ",q=" << q << ",m=" << m << ")";
  const Named params = {{"p", p}, {"q", q}, {"m", static_cast<double>(m)}, {"l", l},
                        {"alpha", alpha}, {"box_length", g.box_length}, {"n", static_cast<double>(g.n)},
                        {"slope_tol", opt.slope_tol}};
  EstimateReport r = slope_report(id.str(), params, opt.t_grid, series(false), theory, lo, hi, g);
  if (opt.variants) {
    r.variants.push_back(slope_report(id.str() + ":adjoint", params, opt.t_grid, series(true), theory,
                                      lo, hi, g));
    const double s = 0.25;
    const double ftheory = -s - 1.5 * (1.0 / p - 0.5);
    std::vector<double> fr;
    for (double t : opt.t_grid) {
      CoriolisSymbolParams sp;
      sp.l = l;
      sp.alpha = alpha;
      sp.t = t;
      fr.push_back(lp_norm(fractional_power(apply_semigroup(data, sp), s), 2.0));
    }
    Named fp = params;
    fp.push_back({"s", s});
    r.variants.push_back(slope_report(id.str() + ":fractional", fp, opt.t_grid, fr, ftheory,
                                      ftheory - opt.slope_tol, ftheory + opt.slope_tol, g));
  }
  return r;
}

EstimateReport check_besov_smoothing(double s0, double s1, double p, double q, double alpha,
                                     const SpectralField& data, const DecayOptions& opt) {
  require(s0 <= s1, "besov smoothing: need s0 <= s1");
  require(p >= 1.0 && q >= 1.0, "besov smoothing: need p, q >= 1");
  require(opt.slope_tol > 0.0, "besov smoothing: slope_tol must be positive");
  check_t_grid(opt.t_grid);
  check_data(data);
  const GridSpec& g = data.grid();
  const DyadicPartition part = DyadicPartition::for_grid(g);
  const double theory = -0.5 * (s1 - s0);
  const double lo = s0 == s1 ? -opt.slope_tol : theory - opt.slope_tol;
  const double hi = s0 == s1 ? 0.0 : theory + opt.slope_tol;
  double worst_uncovered = 0.0;
  auto series = [&](double a) {
    std::vector<double> out;
    for (double t : opt.t_grid) {
      double unc = 0.0;
      out.push_back(besov_norm(apply_heat(data, t, a), s1, p, q, part, &unc));
      worst_uncovered = std::max(worst_uncovered, unc);
    }
    return out;
  };
  std::ostringstream id;
  id << "besov_smoothing(s0=" << s0 << ",s1=" << s1 << ")";
  const Named params = {{"s0", s0}, {"s1", s1}, {"p", p}, {"q", q}, {"alpha", alpha},
                        {"box_length", g.box_length}, {"n", static_cast<double>(g.n)},
                        {"slope_tol", opt.slope_tol}};
  EstimateReport r = slope_report(id.str(), params, opt.t_grid, series(alpha), theory, lo, hi, g);
  if (opt.variants) {
    Named vp = params;
    vp[4].second = alpha + 1.0;
    EstimateReport v = slope_report(id.str() + ":alpha_plus_1", vp, opt.t_grid, series(alpha + 1.0), theory,
                                    lo, hi, g);
    r.results.push_back({"alpha_shift_slope_change", v.result("slope") - r.result("slope")});
    r.results.push_back({"alpha_shift_intercept_change", v.result("intercept") - r.result("intercept")});
    r.variants.push_back(std::move(v));
  }
  r.results.push_back({"uncovered_energy_fraction", worst_uncovered});
  if (worst_uncovered > 0.0) r.warnings.push_back("part of the data lies outside the dyadic annulus");
  return r;
}

std::vector<DecayExperiment> default_decay_suite() {
  constexpr double pi = std::numbers::pi;
  std::vector<DecayExperiment> s;
  DecayExperiment a;
  a.id = "lp_lq_2_2_1";
  a.p = 2, a.q = 2, a.m = 1;
  a.box_length = 4 * pi;
  a.data_exponent = -1.5;
  a.slope_tol = 0.1;
  s.push_back(a);
  DecayExperiment b = a;
  b.id = "lp_lq_2_inf_0";
  b.q = kInfinity, b.m = 0;
  b.slope_tol = 0.15;
  s.push_back(b);
  DecayExperiment c = a;
  c.id = "lp_lq_2_2_0";
  c.m = 0;
  c.box_length = 8 * pi;
  c.data_exponent = -1.7;
  c.slope_tol = 0.1;
  s.push_back(c);
  DecayExperiment d;
  d.id = "besov_m2.5_0";
  d.kind = DecayKind::kBesov;
  d.s0 = -2.5, d.s1 = 0.0;
  d.box_length = 2 * pi;
  d.data_exponent = -1.5 - d.s0;
  d.slope_tol = 0.15;
  s.push_back(d);
  return s;
}

EstimateReport run_decay_experiment(const DecayExperiment& e, int n,
                                    const std::vector<double>& t_grid, bool variants) {
  GridSpec g;
  g.n = n;
  g.box_length = e.box_length;
  g.validate();
  const SpectralField data =
      coherent_broadband_field(g, g.k_min(), g.dealias_cutoff() * g.k_unit(), e.data_exponent);
  DecayOptions opt;
  opt.t_grid = t_grid;
  opt.slope_tol = e.slope_tol;
  opt.variants = variants;
  EstimateReport r = e.kind == DecayKind::kLpLq
                         ? check_lp_lq_decay(e.p, e.q, e.m, e.l, e.alpha, data, opt)
                         : check_besov_smoothing(e.s0, e.s1, e.p, e.q, e.alpha, data, opt);
  r.id = e.id;
  for (auto& v : r.variants) v.id = e.id + v.id.substr(v.id.find(':'));
  r.parameters.push_back({"data_exponent", e.data_exponent});
  return r;
}

EstimateReport run_decay_experiment(const DecayExperiment& e, int n, bool variants) {
  return run_decay_experiment(e, n, log_time_grid(e.t_lo, e.t_hi, e.t_points), variants);
}

AprioriPoint apriori_point(const SolveResult& r, double delta) {
  return {delta, r.report.norms.back(), r.report.forcing_norm_L, r.report.forcing_norm_K};
}

EstimateReport check_apriori_bound(const std::vector<AprioriPoint>& sweep) {
  require(sweep.size() >= 3, "apriori bound: need at least 3 sweep points");
  EstimateReport r;
  r.id = "apriori_bound";
  std::vector<double> d, X, X2, F, ratio, fitted, rel;
  bool all_zero = true;
  for (const auto& p : sweep) {
    d.push_back(p.delta);
    X.push_back(p.solution_X);
    X2.push_back(p.solution_X * p.solution_X);
    F.push_back(p.forcing_L + p.forcing_K);
    all_zero = all_zero && p.solution_X == 0.0 && F.back() == 0.0;
  }
  r.parameters = {{"points", static_cast<double>(sweep.size())}};
  if (all_zero) {
    r.results = {{"a", 0.0}, {"b", 0.0}, {"max_relative_residual", 0.0}};
    r.verdict = Verdict::kPass;
    r.column_names = {"delta", "solution_X", "solution_X_sq", "forcing_L_plus_K"};
    r.columns = {d, X, X2, F};
    return r;
  }
  for (double x : X) require(x > 0.0, "apriori bound: zero solution norm next to nonzero ones");
  const Fit2 fit = nnls2(X, X2, F);
  double worst = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    fitted.push_back(fit.a * X2[i] + fit.b * F[i]);
    rel.push_back((fitted.back() - X[i]) / X[i]);
    ratio.push_back(F[i] > 0.0 ? X[i] / F[i] : 0.0);
    worst = std::max(worst, std::abs(rel.back()));
  }
  std::size_t smallest = std::min_element(d.begin(), d.end()) - d.begin();
  r.results = {{"a", fit.a},
               {"b", fit.b},
               {"max_relative_residual", worst},
               {"linear_response_ratio_smallest_delta", ratio[smallest]}};
  r.column_names = {"delta", "solution_X", "solution_X_sq", "forcing_L_plus_K", "fitted", "relative_residual",
                    "X_over_forcing"};
  r.columns = {d, X, X2, F, fitted, rel, ratio};
  r.verdict = worst < 0.05 ? Verdict::kPass : Verdict::kFail;
  return r;
}

EstimateReport check_ap_transfer(const FieldFn& forcing, const FieldFn& solution,
                                 const AffineSpec& affine, const NormParams& params,
                                 const TransferOptions& opt) {
  require(!opt.epsilon_levels.empty(), "ap transfer: no epsilon levels");
  require(!opt.window.empty(), "ap transfer: empty window");
  const double top = *std::max_element(opt.epsilon_levels.begin(), opt.epsilon_levels.end());
  const ScanResult scan = almost_period_scan(forcing, affine, params, top, opt.s_lo, opt.s_hi, opt.ds,
                                             opt.window, NormKind::kForcing, opt.reference_norm);
  const double ref = scan.reference_norm;
  EstimateReport r;
  r.id = "ap_transfer";
  r.parameters = {{"s_lo", opt.s_lo}, {"s_hi", opt.s_hi}, {"ds", opt.ds},
                  {"window_points", static_cast<double>(opt.window.size())}};
  for (double e : opt.epsilon_levels) r.parameters.push_back({level_key("epsilon_", e), e});

  // Solution reference: its own window norm.
  double sol_ref = 0.0;
  for (double t : opt.window) sol_ref = std::max(sol_ref, solution_snapshot_norm(solution(t), params));
  std::vector<double> s_col, frel, fabs_col, sabs;
  for (const auto& p : scan.points) {
    if (!p.hit) continue;
    s_col.push_back(p.s);
    frel.push_back(p.residual);
    fabs_col.push_back(p.residual * ref);
    sabs.push_back(shift_residual(solution, affine, params, p.s, opt.window, NormKind::kSolution));
  }
  r.column_names = {"s", "forcing_residual_rel", "forcing_residual", "solution_residual"};
  r.columns = {s_col, frel, fabs_col, sabs};
  r.results = {{"forcing_reference_norm", ref}, {"solution_reference_norm", sol_ref},
               {"hits", static_cast<double>(s_col.size())}};
  if (s_col.empty()) {
    r.warnings.push_back("no almost periods found in the scan range");
    r.verdict = Verdict::kInconclusive;
    return r;
  }
  const double fmax = *std::max_element(fabs_col.begin(), fabs_col.end());
  if (fmax <= 1e-12 * ref) {
    // Exactly rotating-periodic forcing: the solution residual is the solver floor.
    const double smax = *std::max_element(sabs.begin(), sabs.end());
    const double rel = sol_ref > 0.0 ? smax / sol_ref : 0.0;
    r.results.push_back({"degenerate", 1.0});
    r.results.push_back({"solution_residual_rel_max", rel});
    r.verdict = rel <= opt.solver_floor ? Verdict::kPass : Verdict::kFail;
    return r;
  }
  std::vector<double> kappas;
  bool every_level = true;
  for (double e : opt.epsilon_levels) {
    double num = 0.0, den = 0.0;
    int hits = 0;
    for (std::size_t i = 0; i < s_col.size(); ++i) {
      if (frel[i] >= e) continue;
      num += sabs[i] * fabs_col[i];
      den += fabs_col[i] * fabs_col[i];
      ++hits;
    }
    r.results.push_back({level_key("hits_eps_", e), static_cast<double>(hits)});
    if (hits == 0 || den == 0.0) {
      every_level = false;
      r.warnings.push_back(level_key("no almost periods below epsilon = ", e));
      continue;
    }
    kappas.push_back(num / den);
    r.results.push_back({level_key("kappa_eps_", e), kappas.back()});
  }
  if (kappas.empty()) {
    r.verdict = Verdict::kInconclusive;
    return r;
  }
  const double mean = std::accumulate(kappas.begin(), kappas.end(), 0.0) / kappas.size();
  double spread = 0.0;
  for (double k : kappas) spread = std::max(spread, std::abs(k / mean - 1.0));
  r.results.push_back({"kappa_mean", mean});
  r.results.push_back({"kappa_max_deviation", spread});
  r.verdict = every_level && spread <= 0.3 ? Verdict::kPass : Verdict::kFail;
  return r;
}

EstimateReport check_aa_limits(const FieldFn& forcing, const FieldFn& forcing_candidate,
                               const FieldFn& solution, const FieldFn& solution_candidate,
                               const std::vector<double>& sequence, const AffineSpec& affine,
                               const NormParams& params, const LimitOptions& opt) {
  require(static_cast<bool>(forcing_candidate) && static_cast<bool>(solution_candidate),
          "aa limits: candidate limits must be specified");
  const LimitReport fr = automorphic_limit_check(forcing, sequence, forcing_candidate, affine, params,
                                                 opt.window, NormKind::kForcing);
  const LimitReport sr = automorphic_limit_check(solution, sequence, solution_candidate, affine, params,
                                                 opt.window, NormKind::kSolution);
  EstimateReport r;
  r.id = "aa_limits";
  r.parameters = {{"kappa", opt.kappa}, {"floor", opt.floor},
                  {"window_points", static_cast<double>(opt.window.size())}};
  r.column_names = {"t_n", "forcing_forward", "forcing_backward", "solution_forward", "solution_backward"};
  r.columns = {sequence, fr.forward, fr.backward, sr.forward, sr.backward};
  const double bound = opt.kappa * fr.last_forward + opt.floor;
  const bool at_floor = std::all_of(sr.forward.begin(), sr.forward.end(), [&](double d) { return d <= opt.floor; });
  r.results = {{"solution_inversions", static_cast<double>(sr.inversions)},
               {"forcing_inversions", static_cast<double>(fr.inversions)},
               {"solution_last", sr.last_forward},
               {"solution_last_backward", sr.last_backward},
               {"forcing_last", fr.last_forward},
               {"bound_last", bound},
               {"at_floor", at_floor ? 1.0 : 0.0}};
  const bool ok = at_floor || (sr.monotone && sr.last_forward <= bound);
  r.verdict = ok ? Verdict::kPass : Verdict::kFail;
  return r;
}

ApAaResult run_ap_aa(const ApAaConfig& cfg, const NormParams& params) {
  cfg.solver.validate();
  const Forcing f = make_forcing(cfg.forcing, params);
  const AffineSpec& aff = cfg.forcing.affine;
  require(aff.exact(), "ap-aa: theta must be a multiple of pi/2");
  const double T = aff.period_T;
  const int M = aff.order();
  const int m = cfg.solver.m_steps;
  require(cfg.window_points >= 1 && m % cfg.window_points == 0,
          "ap-aa: window_points must divide m_steps");
  require(cfg.scan_periods >= 1 && cfg.spinup_periods >= 0, "ap-aa: bad scan or spin-up length");
  require(!cfg.sequence.empty(), "ap-aa: empty return-time sequence");
  const int residue = cfg.candidate_residue;
  for (long k : cfg.sequence)
    require(k >= 1 && (k - residue) % M == 0,
            "ap-aa: sequence entries must match the candidate residue mod the order of Q");
  const double dt = T / m;
  std::vector<double> window;
  for (int j = 0; j < cfg.window_points; ++j) window.push_back(j * T / cfg.window_points);
  const FieldFn ff = [&f](double t) { return f(t); };

  ApAaResult res;
  std::vector<double> levels = cfg.epsilon_levels;
  levels.push_back(cfg.inclusion_epsilon);
  const double top = *std::max_element(levels.begin(), levels.end());
  res.forcing_scan = almost_period_scan(ff, aff, params, top, T, cfg.scan_periods * T, T, window,
                                        NormKind::kForcing, f.norm_L());
  std::vector<double> shifts;
  for (const auto& p : res.forcing_scan.points)
    if (p.hit) shifts.push_back(p.s);

  // Sample plan around the centre t_c: base window, forward shifts, backward shifts.
  const long seq_max = *std::max_element(cfg.sequence.begin(), cfg.sequence.end());
  const double t_c = (cfg.spinup_periods + seq_max) * T;
  std::vector<double> offsets{0.0};
  for (double s : shifts) offsets.push_back(s);
  for (long k : cfg.sequence) {
    offsets.push_back(k * T);
    offsets.push_back(-k * T);
  }
  std::vector<long> idx;
  for (double o : offsets)
    for (double w : window) idx.push_back(std::lround((t_c + o + w) / dt));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  MarchOptions mo;
  mo.dt = dt;
  mo.substeps = cfg.substeps;
  for (long i : idx) mo.keep_times.push_back(i * dt);
  const double t_end = idx.back() * dt;
  SpectralField u0(f.grid());
  u0.set_mean_free(true);
  u0.set_div_free(true);
  MarchResult mr = time_march(ff, u0, t_end, cfg.solver, mo);
  res.march_steps = mr.steps;
  std::map<long, SpectralField> store;
  for (std::size_t i = 0; i < mr.trajectory.times.size(); ++i)
    store.emplace(std::lround(mr.trajectory.times[i] / dt), std::move(mr.trajectory.fields[i]));
  const FieldFn uf = [&](double t) -> SpectralField {
    const auto it = store.find(std::lround((t_c + t) / dt));
    require(it != store.end(), "ap-aa: solution sample outside the plan");
    return it->second;
  };

  TransferOptions to;
  to.epsilon_levels = cfg.epsilon_levels;
  to.s_lo = T;
  to.s_hi = cfg.scan_periods * T;
  to.ds = T;
  to.window = window;
  to.reference_norm = f.norm_L();
  res.ap = check_ap_transfer(ff, uf, aff, params, to);

  // Return windows predicted from the modulation frequency.
  const double beta = cfg.forcing.beta;
  const double eta = return_tolerance(beta, cfg.inclusion_epsilon);
  double gap = 0.0, last = 0.0;
  for (const auto& p : res.forcing_scan.points) {
    if (p.residual >= cfg.inclusion_epsilon) continue;
    gap = std::max(gap, p.s - last);
    last = p.s;
  }
  gap = std::max(gap, cfg.scan_periods * T - last);
  res.ap.results.push_back({"inclusion_epsilon", cfg.inclusion_epsilon});
  res.ap.results.push_back({"largest_gap", gap});
  if (beta != 0.0) {
    res.inclusion_length = predicted_inclusion_length(cfg.forcing.frequency_ratio, M, eta);
    const double window_len = static_cast<double>(res.inclusion_length) * M * T;
    res.ap.results.push_back({"predicted_inclusion_length", window_len});
    if (res.inclusion_length < 0) {
      res.ap.warnings.push_back("predicted inclusion length exceeds the search limit");
    } else if (window_len <= cfg.scan_periods * T && gap > window_len) {
      res.ap.warnings.push_back("a predicted return window has no almost period");
      res.ap.verdict = Verdict::kFail;
    }
  }

  std::vector<double> seq;
  for (long k : cfg.sequence) seq.push_back(k * T);
  LimitOptions lo;
  lo.window = window;
  lo.kappa = res.ap.has_result("kappa_mean") ? res.ap.result("kappa_mean") : 0.0;
  const FieldFn fc = [&](double t) { return f.candidate_limit(t, residue, 0.0); };
  // The solution map commutes with R_Q, so the limit solution is R_Q^{residue-1} u.
  const FieldFn uc = [&](double t) { return rotate_field(uf(t), aff, residue - 1); };
  res.aa = check_aa_limits(ff, fc, uf, uc, seq, aff, params, lo);
  res.aa.parameters.push_back({"march_steps", static_cast<double>(mr.steps)});
  return res;
}

}  // namespace rnse
