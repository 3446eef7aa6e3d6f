#pragma once

#include <stdexcept>
#include <string>

namespace lmgfs {

/// Raised when a parameter or argument lies outside the supported domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produced a non-finite or otherwise unusable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a closed form is evaluated at (or within the guard band of) h = 1.
class SingularPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace lmgfs
