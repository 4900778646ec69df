#pragma once

#include <stdexcept>
#include <string>

namespace bnshift {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input values: non-finite statistics, negative variances, bad arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Layer ids or channel counts disagree with the expected schema.
class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Invalid engine, detector, scenario or evaluation configuration.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bnshift
