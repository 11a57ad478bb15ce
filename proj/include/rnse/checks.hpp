#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnse/field.hpp"

namespace rnse {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured defect
  double tolerance = 0.0;  // pass iff value <= tolerance
  bool pass = false;
};

struct SemigroupCheckOptions {
  int n = 16;            // grid for the field-level checks
  int resolvent_n = 8;   // grid for the Laplace-transform check
  int single_modes = 100;
  double l = 1.0;
  double alpha = 0.5;
  std::vector<double> times{0.1, 0.37, 1.0};  // t, s pairs for the law
  std::uint64_t seed = 1;
  // Field for the law and pairing checks instead of a random one.
  std::optional<SpectralField> data;
};

// Single modes against the closed-form multiplier, the semigroup law, the
// adjoint pairing, resolvent substitution per mode and the Laplace identity
// (resolvent at lambda = 1 against the integral of e^-t T(t) g).
std::vector<CheckResult> semigroup_checks(const SemigroupCheckOptions& opt);

}  // namespace rnse
