#pragma once

#include <stdexcept>
#include <string>

namespace wipet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scanner description violates a geometric precondition.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// No pair of active crystals can register a coincidence through the FOV.
class NoCoincidencePossible : public Error {
 public:
  using Error::Error;
};

/// Operand shapes disagree (image vs grid, sinogram vs sinogram geometry).
class MismatchedShapes : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable (empty activity, malformed files, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wipet
