#pragma once

#include <stdexcept>
#include <string>

namespace entrolab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit together (non-square input, bipartite dims
/// that do not multiply to the operator dimension, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a type invariant (Hermiticity, unit trace, PSD, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to an otherwise well-typed call (zero trace, p < 1, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A matrix function was asked to evaluate outside its domain, e.g. the
/// logarithm of a singular operator. Carries the offending eigenvalue.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Eigensolver failure or a numerical residue above its asserted bound.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (JSON matrix files, configs).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace entrolab
