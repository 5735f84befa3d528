#pragma once

#include <stdexcept>
#include <string>

namespace aerostp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pointwise function was called outside its domain (e.g. a link shorter
/// than the transmitter altitude).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A parameter set violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature hit its subdivision limit. Carries the best estimate
/// reached so callers can decide whether it is usable.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double estimate, double error)
      : Error(what), estimate_(estimate), error_(error) {}

  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

/// The requested quantity is only defined for a subset of parameters
/// (the density bound requires Rayleigh fading on both environments).
class UnsupportedCaseError : public Error {
 public:
  using Error::Error;
};

/// A probability came out of [0, 1] by more than round-off.
class NumericalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A conditional distribution was requested for a class that is never
/// selected (zero association probability).
class UndefinedDistributionError : public Error {
 public:
  using Error::Error;
};

}  // namespace aerostp
