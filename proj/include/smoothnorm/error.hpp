#pragma once

#include <stdexcept>
#include <string>

namespace smoothnorm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (bad shape, ordering, range).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An iterative or quadrature routine ran out of budget or produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis of a check does not hold for the supplied data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A builder could not assemble a valid object from otherwise well-formed input.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace smoothnorm
