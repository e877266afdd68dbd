#pragma once

#include <stdexcept>
#include <string>

namespace qcal {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation (e.g. X < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical failure: stability bound violated, degeneracy, positivity loss.
/// The CLI maps this to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Two eigenvalues of M0 collided within tolerance at the given X.
class DegeneracyError : public NumericalError {
 public:
  DegeneracyError(const std::string& what, double x) : NumericalError(what), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Time step too large for an explicit scheme.
class StabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qcal
