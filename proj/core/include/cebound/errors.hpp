#pragma once

#include <stdexcept>
#include <string>

namespace cebound {

// Every failure raised by the library derives from Error, so callers that
// only care about "did it work" can catch a single type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented structural invariant (Hermiticity, PSD, trace).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A block or base point that must be strictly positive definite is not.
class PositivityError : public Error {
public:
  using Error::Error;
};

/// Iterative numerics failed to converge.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Parameters admit no feasible state; the message names the constraint.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// Polygon target outside the achievable modulus interval.
class RangeError : public Error {
public:
  using Error::Error;
};

/// Grid search exhausted without success.
class NotFoundError : public Error {
public:
  using Error::Error;
};

/// Rejection sampler gave up.
class SamplingError : public Error {
public:
  using Error::Error;
};

} // namespace cebound
