#pragma once

#include <stdexcept>
#include <string>

namespace itact {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad labels, dimension mismatches, unnormalized tables,
/// out-of-range parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The requested budgets (distortion, cost) cannot be met by any distribution.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// The optimizer could not produce a feasible, finite answer.
class OptimizerFailure : public Error {
 public:
  using Error::Error;
};

/// A size guard tripped (dense tensor too large, codebook too large, caps).
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace itact
