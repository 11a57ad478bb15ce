#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rnse/field.hpp"
#include "rnse/forcing.hpp"
#include "rnse/littlewood_paley.hpp"
#include "rnse/solver.hpp"
#include "rnse/symmetry.hpp"

namespace rnse {

enum class Verdict { kPass, kFail, kInconclusive };
std::string to_string(Verdict v);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

// Ordinary least squares y = intercept + slope x. Needs >= 3 points and a
// non-constant x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// `count` points from lo to hi, equally spaced in log t.
std::vector<double> log_time_grid(double lo, double hi, int count);

using Named = std::vector<std::pair<std::string, double>>;

// One experiment's outcome. Columns become the CSV; parameters and results
// keep insertion order in JSON.
struct EstimateReport {
  std::string id;
  Named parameters;
  Named results;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;
  Verdict verdict = Verdict::kInconclusive;
  std::vector<std::string> warnings;
  std::vector<EstimateReport> variants;

  double result(const std::string& key) const;
  bool has_result(const std::string& key) const;
};

// Fail if any part failed, otherwise the verdict of the main experiment.
Verdict combined_verdict(const EstimateReport& r);

std::string to_json(const EstimateReport& r);
std::string to_csv(const EstimateReport& r);

struct DecayOptions {
  std::vector<double> t_grid;
  double slope_tol = 0.1;
  bool variants = true;
};

// Slope of log ||grad^m T(t) g||_q against log t versus
// -m/2 - (3/2)(1/p - 1/q). Adds the adjoint semigroup and the
// ||(-Delta)^(1/4) T(t) g||_2 variant. Verdict is inconclusive when
// R^2 < 0.9 or the window ends past 1/k_min^2; starting below 1/k_max^2
// only warns.
EstimateReport check_lp_lq_decay(double p, double q, int m, double l, double alpha,
                                 const SpectralField& data, const DecayOptions& opt);

// Slope of log ||e^{t Laplacian-bar} f||_{B^{s1}_{p,q}} versus -(s1 - s0)/2,
// with an alpha + 1 variant that should share the exponent.
EstimateReport check_besov_smoothing(double s0, double s1, double p, double q, double alpha,
                                     const SpectralField& data, const DecayOptions& opt);

enum class DecayKind { kLpLq, kBesov };

struct DecayExperiment {
  std::string id;
  DecayKind kind = DecayKind::kLpLq;
  double p = 2.0, q = 2.0;
  int m = 0;
  double s0 = 0.0, s1 = 0.0;
  double box_length = 0.0;
  double data_exponent = 0.0;  // coherent data |k|^exponent on every resolved band
  double l = 1.0, alpha = 0.0;
  double slope_tol = 0.1;
  double t_lo = 0.01, t_hi = 0.5;
  int t_points = 25;
};

// The default suite: (2,2,1), (2,inf,0), (2,2,0) and the (-2.5, 0) Besov
// pair, each with its box length and data spectrum.
std::vector<DecayExperiment> default_decay_suite();

EstimateReport run_decay_experiment(const DecayExperiment& e, int n,
                                    const std::vector<double>& t_grid, bool variants = true);
// Same on the experiment's own window.
EstimateReport run_decay_experiment(const DecayExperiment& e, int n, bool variants = true);

struct AprioriPoint {
  double delta = 0.0;
  double solution_X = 0.0;
  double forcing_L = 0.0;
  double forcing_K = 0.0;
};

AprioriPoint apriori_point(const SolveResult& r, double delta);

// Fits X = a X^2 + b (||f||_L + ||f||_K) with a, b >= 0 in relative least
// squares; pass iff every relative residual is below 5%. Needs >= 3 points.
EstimateReport check_apriori_bound(const std::vector<AprioriPoint>& sweep);

struct TransferOptions {
  std::vector<double> epsilon_levels{5e-2, 2e-2, 1e-2};
  double s_lo = 1.0, s_hi = 200.0, ds = 1.0;
  std::vector<double> window;  // offsets t at which residuals are sampled
  double reference_norm = 0.0;  // forcing norm for relative residuals
  double solver_floor = 1e-6;
};

// Scans the forcing for almost rotating periods, measures the solution
// residual ||u(s + .) - R_Q u(.)||_X at each hit and fits kappa per epsilon
// level (least squares through the origin against the forcing residual).
// Pass iff every level has hits and each kappa is within 30% of their mean.
// A forcing with no residual at all (beta = 0) passes iff the solution
// residual stays below solver_floor.
EstimateReport check_ap_transfer(const FieldFn& forcing, const FieldFn& solution,
                                 const AffineSpec& affine, const NormParams& params,
                                 const TransferOptions& opt);

struct LimitOptions {
  std::vector<double> window;
  double kappa = 0.0;   // transfer constant from check_ap_transfer
  double floor = 1e-5;  // additive solver floor
};

// Limit distances along `sequence` for the forcing against its closed-form
// candidate and for the solution against `solution_candidate`. Pass iff the
// solution distances decrease with at most one inversion and the last one is
// below kappa times the forcing distance plus the floor.
EstimateReport check_aa_limits(const FieldFn& forcing, const FieldFn& forcing_candidate,
                               const FieldFn& solution, const FieldFn& solution_candidate,
                               const std::vector<double>& sequence, const AffineSpec& affine,
                               const NormParams& params, const LimitOptions& opt);

struct ApAaConfig {
  ForcingSpec forcing;  // kind, beta, ratio, affine, delta and profile
  SolverConfig solver;
  std::vector<double> epsilon_levels{5e-2, 2e-2, 1e-2};
  double inclusion_epsilon = 1e-2;
  long scan_periods = 200;
  int window_points = 8;  // per period
  std::vector<long> sequence{1, 5, 29, 169};  // return times in periods
  // Candidate limit R_Q^{residue - 1} f; every sequence entry must have this
  // residue mod the order of Q.
  int candidate_residue = 1;
  long spinup_periods = 20;
  int substeps = 2;
};

struct ApAaResult {
  ScanResult forcing_scan;
  long inclusion_length = -1;  // predicted, in candidate shifts
  EstimateReport ap;
  EstimateReport aa;
  long march_steps = 0;
};

// Marches the solution once, keeping only the samples the checks read, and
// runs the scan, the transfer fit and the limit check.
ApAaResult run_ap_aa(const ApAaConfig& cfg, const NormParams& params);

}  // namespace rnse
