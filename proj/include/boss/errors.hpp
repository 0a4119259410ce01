#pragma once

#include <stdexcept>
#include <string>

namespace boss {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky (or similar) failed; the message names the offending matrix.
struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A callback returned a non-finite value; the message carries the argument.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CurvatureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SupportMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDensity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AccountingError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace boss
