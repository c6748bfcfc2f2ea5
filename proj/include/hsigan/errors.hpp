#pragma once

#include <stdexcept>
#include <string>

namespace hsigan {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or image dimensions disagree with what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered where finite numbers are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated binary container.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose content is semantically invalid (e.g. a label id out of range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsigan
