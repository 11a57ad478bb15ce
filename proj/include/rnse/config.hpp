#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnse/forcing.hpp"
#include "rnse/grid.hpp"
#include "rnse/littlewood_paley.hpp"
#include "rnse/semigroup.hpp"
#include "rnse/solver.hpp"
#include "rnse/symmetry.hpp"

namespace rnse {

struct ForcingSection {
  ForcingKind kind = ForcingKind::kRotatingPeriodic;
  double delta = 1e-2;  // ||f||_L; 0 is the zero forcing
  double beta = 0.0;
  double ratio = 1.4142135623730951;  // sqrt 2
  std::uint64_t profile_seed = 1;
  double k_lo = 1.0, k_hi = 1.5;  // profile band, integer wavenumber units
  // Candidate limit for the automorphic check: residue of k_n mod the order
  // of Q and the limit phase of Omega t_n. Required for kind = aa.
  std::optional<int> candidate_residue;
  double candidate_phase = 0.0;
};

struct ExperimentSection {
  std::string id = "default";
  double t_lo = 0.01, t_hi = 0.5;  // t_window
  int t_points = 25;
  std::optional<double> slope_tol;  // overrides the per-experiment defaults
  // estimates: a single Lp-Lq experiment (p, q, m) on the [grid] box with
  // data spectrum |k|^data_exponent instead of the default suite.
  std::optional<std::array<double, 3>> lp_lq;
  double data_exponent = -1.5;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  bool march_check = false;  // solve: cross-check against time_march
  long spinup_periods = 20;
  int substeps = 2;
  std::vector<double> epsilon_levels{5e-2, 2e-2, 1e-2};
  double inclusion_epsilon = 1e-2;
  long scan_periods = 200;
  int window_points = 8;
  std::vector<long> sequence{1, 5, 29, 169};
};

// Flat INI file: [grid] [coriolis] [affine] [forcing] [solver] [norms]
// [experiment], key = value. Angles accept "pi", "pi/2", "3*pi/2".
struct RunConfig {
  GridSpec grid;
  CoriolisParams coriolis{1.0, 0.0};
  AffineSpec affine{1.5707963267948966, 0.0, 1.0};
  ForcingSection forcing;
  SolverConfig solver;  // solver.params and solver.coriolis mirror [norms] and [coriolis]
  NormParams norms;
  ExperimentSection experiment;

  // Every section's own checks plus the cross-section ones.
  void validate() const;

  SolverConfig solver_config() const;
  ForcingSpec forcing_spec() const;
};

// Unknown sections or keys and unparsable values are ValidationErrors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Normalized form: every key, fixed order, shortest round-trip numbers.
std::string to_ini(const RunConfig& c);

}  // namespace rnse
