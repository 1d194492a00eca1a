#pragma once

#include <stdexcept>
#include <string>

namespace grt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar argument is outside its mathematical domain (|rho| >= 1, kappa <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A value violates a construction invariant (non-PD covariance, unordered bounds, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Same-dimension bounds that are not parallel. Such models have no coherent response regions.
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// The x-bound family is parallel to the y-bound family, so the shear is undefined.
class DegenerateAngleError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on a model outside its precondition (e.g. normalizing without DS).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Data dimensions do not match the model class.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document or file (schema violations, unreadable CSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace grt
