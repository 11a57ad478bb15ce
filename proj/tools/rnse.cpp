#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "rnse/checks.hpp"
#include "rnse/config.hpp"
#include "rnse/error.hpp"
#include "rnse/estimates.hpp"
#include "rnse/fft.hpp"
#include "rnse/operators.hpp"
#include "rnse/rnsf.hpp"
#include "rnse/solver.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace rnse;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

RunConfig load(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.seed) cfg.experiment.seed = *c.seed;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Common& c, const RunConfig& cfg) {
  fs::path p = c.out.empty() ? fs::path(cfg.experiment.output_dir) : fs::path(c.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw FormatError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  o << text;
  if (!o) throw FormatError("cannot write " + p.string());
}

ojson num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? ojson("nan") : ojson(v > 0 ? "inf" : "-inf");
}

ojson array(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void print_verdict(const EstimateReport& r, int depth = 0) {
  std::printf("%*s%-40s %s\n", depth, "", r.id.c_str(), to_string(r.verdict).c_str());
  for (const auto& w : r.warnings) std::printf("%*s  warning: %s\n", depth, "", w.c_str());
  for (const auto& v : r.variants) print_verdict(v, depth + 2);
}

void write_report(const fs::path& dir, const std::string& stem, const EstimateReport& r) {
  write_text(dir / (stem + ".json"), to_json(r));
  write_text(dir / (stem + ".csv"), to_csv(r));
  for (const auto& v : r.variants) {
    std::string name = v.id.substr(v.id.find(':') + 1);
    for (char& ch : name)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
    write_text(dir / (stem + "." + name + ".csv"), to_csv(v));
  }
}

int cmd_semigroup_check(const Common& c, const std::string& field) {
  const RunConfig cfg = load(c);
  SemigroupCheckOptions opt;
  opt.n = cfg.grid.n;
  opt.l = cfg.coriolis.l;
  opt.alpha = cfg.coriolis.alpha;
  opt.times = {cfg.experiment.t_lo, cfg.experiment.t_hi, cfg.experiment.t_lo + cfg.experiment.t_hi};
  opt.seed = cfg.experiment.seed;
  if (!field.empty()) opt.data = read_rnsf_spectral(field);
  const auto checks = semigroup_checks(opt);
  ojson j;
  j["command"] = "semigroup-check";
  j["n"] = opt.n;
  j["l"] = opt.l;
  j["alpha"] = opt.alpha;
  j["times"] = opt.times;
  j["seed"] = opt.seed;
  ojson arr = ojson::array();
  bool ok = true;
  for (const auto& r : checks) {
    std::printf("%-28s %.3e <= %.1e  %s\n", r.name.c_str(), r.value, r.tolerance, r.pass ? "pass" : "FAIL");
    arr.push_back({{"name", r.name}, {"value", num(r.value)}, {"tolerance", r.tolerance}, {"pass", r.pass}});
    ok = ok && r.pass;
  }
  j["checks"] = arr;
  j["verdict"] = ok ? "pass" : "fail";
  write_text(out_dir(c, cfg) / "semigroup_check.json", j.dump(2) + "\n");
  return ok ? exit_code::kPass : exit_code::kFail;
}

int cmd_estimates(const Common& c) {
  const RunConfig cfg = load(c);
  const ExperimentSection& e = cfg.experiment;
  std::vector<DecayExperiment> suite = default_decay_suite();
  if (e.lp_lq) {
    DecayExperiment x;
    x.id = "lp_lq_custom";
    x.p = (*e.lp_lq)[0];
    x.q = (*e.lp_lq)[1];
    x.m = static_cast<int>((*e.lp_lq)[2]);
    x.box_length = cfg.grid.box_length;
    x.data_exponent = e.data_exponent;
    x.l = cfg.coriolis.l;
    x.alpha = cfg.coriolis.alpha;
    suite = {x};
  }
  const auto grid = log_time_grid(e.t_lo, e.t_hi, e.t_points);
  const fs::path dir = out_dir(c, cfg);
  ojson summary;
  summary["command"] = "estimates";
  summary["n"] = cfg.grid.n;
  summary["t_window"] = {e.t_lo, e.t_hi};
  ojson list = ojson::array();
  bool failed = false;
  for (DecayExperiment x : suite) {
    if (e.slope_tol) x.slope_tol = *e.slope_tol;
    const EstimateReport r = run_decay_experiment(x, cfg.grid.n, grid);
    print_verdict(r);
    write_report(dir, r.id, r);
    const Verdict v = combined_verdict(r);
    failed = failed || v == Verdict::kFail;
    list.push_back({{"id", r.id},
                    {"slope", num(r.result("slope"))},
                    {"theory_slope", num(r.result("theory_slope"))},
                    {"r_squared", num(r.result("r_squared"))},
                    {"verdict", to_string(r.verdict)},
                    {"combined_verdict", to_string(v)},
                    {"warnings", r.warnings}});
  }
  summary["experiments"] = list;
  summary["verdict"] = failed ? "fail" : "pass";
  write_text(dir / "estimates.json", summary.dump(2) + "\n");
  return failed ? exit_code::kFail : exit_code::kPass;
}

ojson report_json(const ContractionReport& r) {
  ojson j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["increments"] = array(r.increments);
  j["ratios"] = array(r.ratios);
  j["resolved_ratios"] = r.resolved_ratios;
  j["norms"] = array(r.norms);
  j["rho_final"] = num(r.rho_final);
  j["fixed_point_residual"] = num(r.fixed_point_residual);
  j["rotating_residual"] = num(r.rotating_residual);
  j["tail_bound"] = num(r.tail_bound);
  j["forcing_norm_L"] = num(r.forcing_norm_L);
  j["forcing_norm_K"] = num(r.forcing_norm_K);
  return j;
}

int cmd_solve(const Common& c) {
  const RunConfig cfg = load(c);
  require(cfg.forcing.kind == ForcingKind::kRotatingPeriodic,
          "solve: the periodic solver needs a rotating periodic forcing (kind = rotating_periodic)");
  const SolverConfig sc = cfg.solver_config();
  const Forcing f = make_forcing(cfg.forcing_spec(), sc.params);
  const SolveResult res = solve_rotating_periodic(f, sc);
  const fs::path dir = out_dir(c, cfg);
  fs::create_directories(dir / "orbit");

  ojson files = ojson::array();
  for (int i = 0; i < res.orbit.m_steps; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "orbit_%03d.rnsf", i);
    write_rnsf(dir / "orbit" / name, res.orbit.snapshots[i],
               {{"t", i * res.orbit.dt()}, {"period_T", res.orbit.period_T}, {"theta", res.orbit.affine.theta}});
    files.push_back(std::string("orbit/") + name);
  }

  bool ok = res.report.converged && res.report.rotating_residual < 1e-6;
  ojson m;
  m["command"] = "solve";
  m["experiment"] = cfg.experiment.id;
  m["delta"] = cfg.forcing.delta;
  m["n"] = cfg.grid.n;
  m["m_steps"] = sc.m_steps;
  m["report"] = report_json(res.report);
  if (!f.zero()) {
    const ContractionEstimates d = contraction_diagnostics(res.report);
    m["diagnostics"] = {{"C1_hat", num(d.C1_hat)}, {"C2_hat", num(d.C2_hat)}, {"K_hat", num(d.K_hat)},
                        {"two_C1K_hat", num(d.two_C1K_hat)}};
    // second start from a random orbit
    const double amp = 0.1 * res.report.norms.back() + 1e-12;
    const OrbitSamples start = random_orbit(f.grid(), f.spec().affine, sc.m_steps, amp, cfg.experiment.seed);
    const SolveResult alt = solve_rotating_periodic(f, sc, &start);
    Trajectory diff;
    for (int i = 0; i < sc.m_steps; ++i) {
      diff.times.push_back(i * res.orbit.dt());
      diff.fields.push_back(res.orbit.snapshots[i] - alt.orbit.snapshots[i]);
    }
    const double dist = solution_norm_X(diff, sc.params);
    m["uniqueness"] = {{"distance_X", num(dist)}, {"tolerance", 10 * sc.picard_tol}};
    ok = ok && dist <= 10 * sc.picard_tol;
  }
  if (cfg.experiment.march_check && !f.zero()) {
    MarchOptions mo;
    mo.dt = res.orbit.dt();
    mo.substeps = cfg.experiment.substeps;
    const double t0 = cfg.experiment.spinup_periods * res.orbit.period_T;
    mo.keep_from = t0;
    SpectralField u0(f.grid());
    u0.set_mean_free(true);
    u0.set_div_free(true);
    const FieldFn ff = [&f](double t) { return f(t); };
    const MarchResult mr = time_march(ff, u0, t0 + res.orbit.period_T, sc, mo);
    Trajectory diff;
    for (std::size_t i = 0; i < mr.trajectory.fields.size(); ++i) {
      diff.times.push_back(mr.trajectory.times[i]);
      diff.fields.push_back(mr.trajectory.fields[i] - res.orbit.at(std::lround(mr.trajectory.times[i] / mo.dt)));
    }
    const double dist = solution_norm_X(diff, sc.params);
    m["march_check"] = {{"spinup_periods", cfg.experiment.spinup_periods},
                        {"distance_X", num(dist)},
                        {"tolerance", 1e-5},
                        {"max_cfl", num(mr.max_cfl)},
                        {"warnings", mr.warnings}};
    ok = ok && dist < 1e-5;
  }
  m["files"] = files;
  m["verdict"] = ok ? "pass" : "fail";
  write_text(dir / "manifest.json", m.dump(2) + "\n");
  std::printf("iterations %d  rho_final %.3e  rotating residual %.3e  %s\n", res.report.iterations,
              res.report.rho_final, res.report.rotating_residual, ok ? "pass" : "FAIL");
  return ok ? exit_code::kPass : exit_code::kFail;
}

int cmd_ap_aa(const Common& c) {
  const RunConfig cfg = load(c);
  const ExperimentSection& e = cfg.experiment;
  require(cfg.forcing.kind != ForcingKind::kRotatingPeriodic,
          "ap-aa: needs kind = spiral_almost_periodic or spiral_almost_automorphic");
  if (cfg.forcing.kind == ForcingKind::kSpiralAlmostAutomorphic)
    require(cfg.forcing.candidate_residue.has_value(),
            "ap-aa: an automorphic forcing needs a candidate limit (forcing.candidate_residue)");
  require(cfg.forcing.candidate_phase == 0.0,
          "ap-aa: only phase 0 candidate limits have a computable solution limit");
  ApAaConfig ac;
  ac.forcing = cfg.forcing_spec();
  ac.solver = cfg.solver_config();
  ac.epsilon_levels = e.epsilon_levels;
  ac.inclusion_epsilon = e.inclusion_epsilon;
  ac.scan_periods = e.scan_periods;
  ac.window_points = e.window_points;
  ac.sequence = e.sequence;
  ac.spinup_periods = e.spinup_periods;
  ac.substeps = e.substeps;
  ac.candidate_residue = cfg.forcing.candidate_residue.value_or(1);
  const ApAaResult r = run_ap_aa(ac, ac.solver.params);
  const fs::path dir = out_dir(c, cfg);
  write_text(dir / "forcing_scan.csv", scan_csv(r.forcing_scan));
  write_report(dir, "ap_transfer", r.ap);
  write_report(dir, "aa_limits", r.aa);
  print_verdict(r.ap);
  print_verdict(r.aa);
  const bool ok = r.ap.verdict != Verdict::kFail && r.aa.verdict != Verdict::kFail;
  ojson s;
  s["command"] = "ap-aa";
  s["experiment"] = e.id;
  s["beta"] = cfg.forcing.beta;
  s["ratio"] = cfg.forcing.ratio;
  s["march_steps"] = r.march_steps;
  s["inclusion_length"] = r.inclusion_length;
  s["ap_verdict"] = to_string(r.ap.verdict);
  s["aa_verdict"] = to_string(r.aa.verdict);
  if (r.ap.has_result("kappa_mean")) s["kappa_hat"] = num(r.ap.result("kappa_mean"));
  s["verdict"] = ok ? "pass" : "fail";
  write_text(dir / "ap_aa.json", s.dump(2) + "\n");
  return ok ? exit_code::kPass : exit_code::kFail;
}

int cmd_norms(const Common& c, const std::string& file) {
  const RunConfig cfg = load(c);
  const SpectralField f = read_rnsf_spectral(file);
  const PhysicalField u = to_physical(f);
  ojson j;
  j["file"] = file;
  j["n"] = f.grid().n;
  j["box_length"] = f.grid().box_length;
  j["l2"] = num(l2_norm(f));
  j["linf"] = num(lp_norm(u, kInfinity));
  j["divergence_defect"] = num(divergence_defect(f));
  j["mean_free"] = f.mean_free();
  if (f.mean_free()) {
    j["solution_snapshot_X"] = num(solution_snapshot_norm(f, cfg.norms));
    j["forcing_snapshot_L"] = num(forcing_snapshot_norm(f, cfg.norms));
  }
  std::cout << j.dump(2) << "\n";
  return exit_code::kPass;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return exit_code::kFormat;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return exit_code::kValidation;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return exit_code::kDivergence;
  } catch (const NonConvergenceError& e) {
    std::fprintf(stderr, "no convergence: %s\n", e.what());
    return exit_code::kFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating Navier-Stokes experiments on the periodic box"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "INI run configuration");
    sub->add_option("--out", common.out, "output directory (default: experiment.output_dir)");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { common.seed = s; },
                                            "override experiment.seed");
  };

  std::string field;
  auto* semi = app.add_subcommand("semigroup-check", "semigroup, adjoint and resolvent checks");
  add_common(semi);
  semi->add_option("--field", field, "RNSF field for the law and pairing checks");
  auto* est = app.add_subcommand("estimates", "decay and smoothing exponent experiments");
  add_common(est);
  auto* solve = app.add_subcommand("solve", "rotating periodic solve with orbit files");
  add_common(solve);
  auto* apaa = app.add_subcommand("ap-aa", "almost periodic transfer and automorphic limits");
  add_common(apaa);
  std::string file;
  auto* norms = app.add_subcommand("norms", "norms of an RNSF field file");
  add_common(norms);
  norms->add_option("file", file, "RNSF file")->required();
  auto* show = app.add_subcommand("config", "print the normalized configuration");
  add_common(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::kValidation;
  }

  if (*semi) return guarded([&] { return cmd_semigroup_check(common, field); });
  if (*est) return guarded([&] { return cmd_estimates(common); });
  if (*solve) return guarded([&] { return cmd_solve(common); });
  if (*apaa) return guarded([&] { return cmd_ap_aa(common); });
  if (*norms) return guarded([&] { return cmd_norms(common, file); });
  return guarded([&] {
    std::cout << to_ini(load(common));
    return exit_code::kPass;
  });
}
