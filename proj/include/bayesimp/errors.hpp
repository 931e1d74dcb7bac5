#pragma once

#include <stdexcept>
#include <string>

namespace bayesimp {

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape / dimensionality violations (kernel eval on mismatched points, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter values (nonpositive lengthscale, pi outside [0,1], ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A symmetric solve failed even at the maximum jitter level.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Config file problems; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem problems; the CLI maps this to exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bayesimp
