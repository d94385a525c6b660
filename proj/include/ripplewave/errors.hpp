#pragma once

#include <stdexcept>
#include <string>

namespace ripple {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model or simulation parameters, detected at construction time.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. Lambda at rho <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object it does not apply to.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Iteration failed to converge, state blew up, or a claimed invariant
/// does not hold numerically.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A search finished without finding anything (empty tuple set, no
/// admissible wave). Not a malfunction.
class NoResultError : public Error {
 public:
  using Error::Error;
};

}  // namespace ripple
