#pragma once

#include <stdexcept>
#include <string>

namespace mgsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid dimensions are incompatible with the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent solver, operator or generator settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied values (non-finite data, out-of-range inputs).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Weights do not match their architecture descriptor.
class WeightsError : public Error {
 public:
  using Error::Error;
};

/// Linear algebra failure (singular normal equations and similar).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A time integration produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or has the wrong format.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mgsr
