#pragma once

#include <stdexcept>
#include <string>

namespace paaconv {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller passed an argument that is out of range or otherwise unusable
// (k < 1, stride < 1, negative cell size, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Input data violates a precondition (non-finite coordinate, unlabeled
// point where a label is required, empty cloud, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Tensor or parameter shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A configuration value is out of range or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An operation was called in the wrong order (backward before forward,
// reading gradients that were never computed, ...).
class StateError : public Error {
 public:
  using Error::Error;
};

// A text or binary input could not be parsed. Messages carry the line
// number or byte offset where applicable.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Neighborhood too small or rank-deficient for a plane fit.
class DegenerateNeighborhoodError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined for the accumulated counts (e.g. no samples).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace paaconv
