#pragma once

#include <stdexcept>
#include <string>

namespace curvident {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// Operand shape mismatch (dim, rank, index count).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed contraction or delta binding specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A rank-4 tensor failed one of the curvature symmetries.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation called outside its domain (wrong dimension, r out of range...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// JSON document does not follow the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace curvident
