// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_ERROR_HPP
#define VOXALIGN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace voxalign {

// Every failure raised by the library derives from Error. The CLI maps
// ValidationError descendants to exit code 1 and IoError descendants to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MappingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MatrixError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SpecError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public IoError {
 public:
  using IoError::IoError;
};

class ParseError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace voxalign

#endif  // VOXALIGN_ERROR_HPP
