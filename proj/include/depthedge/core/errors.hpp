#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depthedge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid too small, or two grids that must agree in shape do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A mean or ratio was requested over zero valid pixels.
class EmptyDomainError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter violates its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a precondition (e.g. nonpositive depth at a valid pixel).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Min and max of a range coincide, so it cannot be normalized.
class DegenerateRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A metric is undefined for the given input (e.g. no predicted edges).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. Carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace depthedge
