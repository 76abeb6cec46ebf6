#pragma once

#include <stdexcept>
#include <string>

namespace rfmagic {

// Bad input: invalid quantum numbers, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: a solver did not converge or a bracket was not found.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Floquet eigenvectors could not be attributed to the central block, which
// happens at multiphoton resonances and level anticrossings.
class ClassificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rfmagic
