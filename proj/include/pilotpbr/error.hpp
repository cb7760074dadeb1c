#pragma once

#include <stdexcept>
#include <string>

namespace pilotpbr {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions, spaces or labels between two objects.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented invariant (unnormalized weights, bad grid...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete configuration / model document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical integration left its accuracy envelope.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A statistical estimate could not be formed or missed its band.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

}  // namespace pilotpbr
