#pragma once

#include <stdexcept>
#include <string>

namespace kahler {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class BoundaryMismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedInvariantError : public Error {
 public:
  using Error::Error;
};

class UnsupportedProjectionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PositivityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by the harmonic flow when the step budget runs out.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// A computation that is only valid for pluriharmonic input was handed a map
/// whose D''d residual exceeds the gate.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace kahler
