#pragma once

#include <stdexcept>
#include <string>

namespace concord {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid data or arguments: malformed vectors, out-of-range thresholds,
/// unmet solver preconditions, unparseable instance files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operands whose dimensions do not match.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The constraints describe an empty feasible region.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure or resource exhaustion inside a solver.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace concord
