#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapforge {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry with zero total arc length (all input points coincident).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

// Mismatched point counts or array shapes.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Non-finite entry in an assignment cost matrix.
class InvalidCost : public Error {
 public:
  using Error::Error;
};

// Target slot count too small for the requested padding/repetition.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

// Empty point set where at least one point is required.
class EmptyGeometry : public Error {
 public:
  using Error::Error;
};

// Synthetic scene generation could not satisfy the recipe.
class GenerationFailed : public Error {
 public:
  using Error::Error;
};

// Non-finite loss encountered during fitting.
class DivergenceDetected : public Error {
 public:
  DivergenceDetected(const std::string& what, std::size_t iteration)
      : Error(what), iteration(iteration) {}
  std::size_t iteration;
};

// Malformed or schema-invalid input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapforge
