#pragma once

#include <stdexcept>
#include <string>

namespace drpo {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DRPO_ERROR_KIND(Name)                               \
  class Name : public Error {                               \
  public:                                                   \
    explicit Name(const std::string& msg) : Error(msg) {}   \
  }

DRPO_ERROR_KIND(ParseError);            // malformed input file
DRPO_ERROR_KIND(DataError);             // well-formed file, invalid contents
DRPO_ERROR_KIND(SingularCovariance);    // covariance not positive definite
DRPO_ERROR_KIND(DimensionMismatch);     // conflicting vector/matrix sizes
DRPO_ERROR_KIND(DegenerateBase);        // zero base portfolio variance
DRPO_ERROR_KIND(DomainError);           // scalar argument outside its domain
DRPO_ERROR_KIND(InfeasibleRegion);      // constraint set empty
DRPO_ERROR_KIND(NumericalFailure);      // iterative method did not converge
DRPO_ERROR_KIND(DegenerateConstraints); // linearly dependent active constraints
DRPO_ERROR_KIND(BadNormalization);      // constraint normalization impossible
DRPO_ERROR_KIND(RangeError);            // requested level not attainable
DRPO_ERROR_KIND(CapExceeded);           // enumeration beyond configured cap
DRPO_ERROR_KIND(BracketFailure);        // bisection bracket never crossed

#undef DRPO_ERROR_KIND

}  // namespace drpo
