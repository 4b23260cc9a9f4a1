#pragma once

#include <stdexcept>
#include <string>

namespace qeikit {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A series or integral failed its decay test.
class DivergenceDetected : public Error {
 public:
  using Error::Error;
};

// Quadrature or eigensolver could not reach the requested tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Frequency grid too coarse for the time-domain extent of the weight.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class NonPositiveScale : public Error {
 public:
  using Error::Error;
};

class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

// m = 0 with the k = 0 mode in the box: omega_0 vanishes.
class MasslessZeroMode : public Error {
 public:
  using Error::Error;
};

class MismatchedInputs : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace qeikit
