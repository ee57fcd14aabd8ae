#pragma once

#include <stdexcept>
#include <string>

namespace gsc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid carpet data: bad dimensions, out-of-range tuples, duplicates,
/// malformed spec files.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A configured resource limit (cell budget, encoding range) was exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve failed to reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual, long long iterations)
      : Error(what), best_residual(best_residual), iterations(iterations) {}

  double best_residual = 0.0;
  long long iterations = 0;
};

}  // namespace gsc
