#pragma once

#include <stdexcept>
#include <string>

namespace rnse {

/// Base class of every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or a config constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point or time-stepping iteration ran away.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Iteration budget exhausted before reaching tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

namespace exit_code {
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kFormat = 2;
inline constexpr int kValidation = 3;
inline constexpr int kDivergence = 4;
}  // namespace exit_code

// Throws ValidationError with `what` when `cond` is false.
inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace rnse
