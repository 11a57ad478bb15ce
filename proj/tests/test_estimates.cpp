#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "rnse/error.hpp"
#include "rnse/estimates.hpp"
#include "rnse/operators.hpp"

using namespace rnse;

namespace {

constexpr double kPi = std::numbers::pi;

// ||grad T(t) g||_2 summed mode by mode; the Coriolis factor is orthogonal on
// each divergence-free mode, so only the heat factor remains.
double gradient_l2_oracle(const SpectralField& g, double t) {
  const GridSpec& gr = g.grid();
  double sum = 0.0;
  for_each_mode(gr, [&](int i1, int i2, int i3, std::size_t idx) {
    const auto k = wavevector(gr, i1, i2, i3);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    for (int c = 0; c < 3; ++c) sum += std::norm(g.at(c, idx)) * k2 * std::exp(-2.0 * k2 * t);
  });
  return std::sqrt(gr.volume() * sum);
}

ForcingSpec ap_spec(const GridSpec& g, double beta) {
  ForcingSpec s;
  s.kind = ForcingKind::kSpiralAlmostPeriodic;
  s.profile = make_profile(g, 1.0, 1.5, 3);
  s.delta = 1e-2;
  s.affine.theta = kPi / 2;
  s.beta = beta;
  s.frequency_ratio = std::sqrt(2.0);
  return s;
}

std::vector<double> window8() {
  std::vector<double> w;
  for (int j = 0; j < 8; ++j) w.push_back(j / 8.0);
  return w;
}

}  // namespace

TEST_CASE("line fit and time grid") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y;
  for (double v : x) y.push_back(3.0 - 0.75 * v);
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_line({1.0, 2.0}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(fit_line({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), ValidationError);

  const auto t = log_time_grid(0.01, 1.0, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == doctest::Approx(0.01));
  CHECK(t.back() == doctest::Approx(1.0));
  CHECK(t[2] == doctest::Approx(0.1));
}

TEST_CASE("Lp-Lq decay check") {
  GridSpec g;
  g.n = 32;
  g.box_length = 4 * kPi;
  const SpectralField data = coherent_broadband_field(g, g.k_min(), 6.0, -1.5);
  DecayOptions opt;
  opt.t_grid = log_time_grid(0.02, 0.5, 9);

  SUBCASE("gradient norms match the mode sum") {
    const EstimateReport r = check_lp_lq_decay(2.0, 2.0, 1, 1.0, 0.0, data, opt);
    REQUIRE(r.columns.size() == 5);
    for (std::size_t i = 0; i < opt.t_grid.size(); ++i)
      CHECK(r.columns[1][i] == doctest::Approx(gradient_l2_oracle(data, opt.t_grid[i])).epsilon(1e-10));
    CHECK(r.variants.size() == 2);
    CHECK(r.result("theory_slope") == doctest::Approx(-0.5));
  }
  SUBCASE("p = q = 2, m = 0 accepts only non-growth") {
    const EstimateReport r = check_lp_lq_decay(2.0, 2.0, 0, 1.0, 0.0, data, opt);
    CHECK(r.result("accept_hi") == 0.0);
    CHECK(r.result("accept_lo") == doctest::Approx(-0.1));
    CHECK(r.result("slope") <= 0.0);
  }
  SUBCASE("late window is inconclusive") {
    DecayOptions late = opt;
    late.t_grid = log_time_grid(10.0, 20.0, 5);
    const EstimateReport r = check_lp_lq_decay(2.0, 2.0, 1, 1.0, 0.0, data, late);
    CHECK(r.verdict == Verdict::kInconclusive);
    CHECK_FALSE(r.warnings.empty());
  }
  SUBCASE("bad exponents and data are rejected") {
    CHECK_THROWS_AS(check_lp_lq_decay(2.0, 1.5, 0, 1.0, 0.0, data, opt), ValidationError);
    CHECK_THROWS_AS(check_lp_lq_decay(2.0, 2.0, 3, 1.0, 0.0, data, opt), ValidationError);
    DecayOptions two = opt;
    two.t_grid = {0.1, 0.2};
    CHECK_THROWS_AS(check_lp_lq_decay(2.0, 2.0, 0, 1.0, 0.0, data, two), ValidationError);
    SpectralField bad = data;
    for (std::size_t i = 0; i < bad.points(); ++i) bad.at(0, i) += bad.at(2, i);
    CHECK_THROWS_AS(check_lp_lq_decay(2.0, 2.0, 0, 1.0, 0.0, bad, opt), ValidationError);
  }
}

TEST_CASE("Besov smoothing check") {
  DecayExperiment e = default_decay_suite().back();
  REQUIRE(e.kind == DecayKind::kBesov);
  const EstimateReport r = run_decay_experiment(e, 32, log_time_grid(0.02, 0.5, 9));
  CHECK(r.result("theory_slope") == doctest::Approx(-1.25));
  CHECK(r.result("slope") == doctest::Approx(-1.25).epsilon(0.1));
  CHECK(r.verdict == Verdict::kPass);

  SUBCASE("s0 = s1 brackets zero") {
    GridSpec g;
    g.n = 16;
    DecayOptions opt;
    opt.t_grid = log_time_grid(0.05, 0.5, 5);
    opt.variants = false;
    const SpectralField d = coherent_broadband_field(g, 1.0, 5.0, -1.5);
    const EstimateReport z = check_besov_smoothing(0.0, 0.0, 2.0, 2.0, 0.0, d, opt);
    CHECK(z.result("accept_hi") == 0.0);
    CHECK(z.result("slope") <= 0.0);
    CHECK_THROWS_AS(check_besov_smoothing(1.0, 0.0, 2.0, 2.0, 0.0, d, opt), ValidationError);
  }
}

TEST_CASE("report serialization") {
  EstimateReport r;
  r.id = "demo";
  r.parameters = {{"z", 1.0}, {"q", kInfinity}, {"a", 2.0}};
  r.results = {{"slope", -0.5}};
  r.column_names = {"t", "v"};
  r.columns = {{1.0, 2.0}, {0.5, 0.25}};
  r.verdict = Verdict::kPass;
  const auto j = nlohmann::ordered_json::parse(to_json(r));
  CHECK(j["verdict"] == "pass");
  CHECK(j["parameters"]["q"] == "inf");
  CHECK(j["parameters"].begin().key() == "z");
  CHECK(to_csv(r) == "t,v\n1,0.5\n2,0.25\n");
  CHECK(to_json(r) == to_json(r));
  CHECK_THROWS_AS(r.result("missing"), ValidationError);

  EstimateReport v = r;
  v.verdict = Verdict::kFail;
  r.variants.push_back(v);
  CHECK(combined_verdict(r) == Verdict::kFail);
}

TEST_CASE("a priori bound fit") {
  SUBCASE("recovers an exact law") {
    std::vector<AprioriPoint> sw;
    for (double d : {1e-3, 1e-2, 1e-1, 0.5}) {
      // X = 0.2 X^2 + 0.4 F solved for X with F = 2 d.
      const double F = 2 * d;
      const double X = (1.0 - std::sqrt(1.0 - 4 * 0.2 * 0.4 * F)) / (2 * 0.2);
      sw.push_back({d, X, d, d});
    }
    const EstimateReport r = check_apriori_bound(sw);
    CHECK(r.result("a") == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(r.result("b") == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(r.verdict == Verdict::kPass);
  }
  SUBCASE("square-root growth does not fit") {
    std::vector<AprioriPoint> sw;
    for (double d : {1e-4, 1e-3, 1e-2, 1e-1}) sw.push_back({d, std::sqrt(d), d / 2, d / 2});
    CHECK(check_apriori_bound(sw).verdict == Verdict::kFail);
  }
  SUBCASE("zero forcing and short sweeps") {
    const std::vector<AprioriPoint> zero(3);
    const EstimateReport r = check_apriori_bound(zero);
    CHECK(r.verdict == Verdict::kPass);
    CHECK(r.result("a") == 0.0);
    CHECK_THROWS_AS(check_apriori_bound(std::vector<AprioriPoint>(2)), ValidationError);
  }
}

TEST_CASE("almost-periodic transfer") {
  GridSpec g;
  g.n = 8;
  NormParams params;
  TransferOptions opt;
  opt.s_hi = 60.0;
  opt.window = window8();

  SUBCASE("a linear response transfers with a stable constant") {
    const Forcing f = make_forcing(ap_spec(g, 0.1), params);
    const FieldFn ff = [&](double t) { return f(t); };
    const FieldFn uf = [&](double t) { return 0.3 * f(t); };
    opt.reference_norm = f.norm_L();
    const EstimateReport r = check_ap_transfer(ff, uf, f.spec().affine, params, opt);
    CHECK(r.verdict == Verdict::kPass);
    CHECK(r.result("kappa_max_deviation") <= 0.3);
    CHECK(r.result("hits") >= 3);
  }
  SUBCASE("a response that is not rotating fails") {
    const Forcing f = make_forcing(ap_spec(g, 0.1), params);
    const SpectralField drift = 1e-3 * make_profile(g, 1.0, 2.0, 11);
    const FieldFn ff = [&](double t) { return f(t); };
    const FieldFn uf = [&](double t) { return 0.3 * f(t) + drift; };
    opt.reference_norm = f.norm_L();
    const EstimateReport r = check_ap_transfer(ff, uf, f.spec().affine, params, opt);
    CHECK(r.verdict == Verdict::kFail);
  }
  SUBCASE("beta = 0 only needs the solver floor") {
    const Forcing f = make_forcing(ap_spec(g, 0.0), params);
    const FieldFn ff = [&](double t) { return f(t); };
    opt.reference_norm = f.norm_L();
    const EstimateReport r = check_ap_transfer(ff, ff, f.spec().affine, params, opt);
    CHECK(r.result("degenerate") == 1.0);
    CHECK(r.verdict == Verdict::kPass);
  }
}

TEST_CASE("automorphic limits") {
  GridSpec g;
  g.n = 8;
  NormParams params;
  const Forcing f = make_forcing(ap_spec(g, 0.1), params);
  const FieldFn ff = [&](double t) { return f(t); };
  const FieldFn fc = [&](double t) { return f.candidate_limit(t, 1, 0.0); };
  const FieldFn uf = [&](double t) { return 0.3 * f(t); };
  const FieldFn uc = [&](double t) { return 0.3 * f.candidate_limit(t, 1, 0.0); };
  LimitOptions opt;
  opt.window = window8();
  opt.kappa = 1.0;

  const EstimateReport r = check_aa_limits(ff, fc, uf, uc, {1.0, 5.0, 29.0, 169.0}, f.spec().affine, params, opt);
  CHECK(r.verdict == Verdict::kPass);
  CHECK(r.result("solution_inversions") == 0.0);

  const EstimateReport rev =
      check_aa_limits(ff, fc, uf, uc, {169.0, 29.0, 5.0, 1.0}, f.spec().affine, params, opt);
  CHECK(rev.verdict == Verdict::kFail);
  CHECK(rev.result("solution_inversions") == 3.0);
}

TEST_CASE("ap-aa pipeline on a small grid") {
  GridSpec g;
  g.n = 8;
  NormParams params;
  auto run = [&](double beta) {
    ApAaConfig c;
    c.forcing = ap_spec(g, beta);
    c.solver.m_steps = 16;
    c.scan_periods = 60;
    c.spinup_periods = 10;
    c.sequence = {1, 5, 29};
    c.epsilon_levels = {5e-2, 2e-2};
    return run_ap_aa(c, params);
  };
  const ApAaResult a = run(0.1);
  const ApAaResult b = run(0.05);
  CHECK(a.ap.verdict == Verdict::kPass);
  CHECK(a.aa.verdict == Verdict::kPass);
  CHECK(b.ap.verdict == Verdict::kPass);
  const double ratio = a.ap.result("kappa_mean") / b.ap.result("kappa_mean");
  CHECK(ratio >= 0.7);
  CHECK(ratio <= 1.3);

  ApAaConfig bad;
  bad.forcing = ap_spec(g, 0.1);
  bad.solver.m_steps = 16;
  bad.sequence = {2};
  CHECK_THROWS_AS(run_ap_aa(bad, params), ValidationError);
}
