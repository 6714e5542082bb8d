#pragma once

#include <stdexcept>
#include <string>

namespace loglin {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Caller misuse: mismatched cell spaces, bad indices, malformed arguments.
class UsageError : public Error {
public:
  using Error::Error;
};

// An exact-enumeration operation was asked to run on a space that exceeds
// the configured guard. The caller should switch to a marginal/local path.
class CapacityError : public Error {
public:
  using Error::Error;
};

// Mathematical domain violation: nonpositive probabilities, a
// non-decomposable graph passed to the decomposable closed form, etc.
class DomainError : public Error {
public:
  using Error::Error;
};

// The maximum likelihood estimate does not exist for the given data
// (zero marginal counts, separation, or diverging parameters).
class NonexistenceError : public Error {
public:
  using Error::Error;
};

// An iterative solver hit its cycle limit. Carries the last residual.
class NonconvergenceError : public Error {
public:
  NonconvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

// A matrix that must be positive definite turned out singular.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

// A parameter component has no contributing vertex under a local method.
class CoverageError : public Error {
public:
  using Error::Error;
};

}  // namespace loglin
