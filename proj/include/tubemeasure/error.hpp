#pragma once

#include <stdexcept>
#include <string>

namespace tubemeasure {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ambient or cross-section dimension outside the supported range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Operation needs a bounded set but received e.g. a product with a line.
class UnboundedShapeError : public Error {
 public:
  using Error::Error;
};

/// Zero diameter, flat polytope, or a polygon with fewer than three corners.
class DegenerateShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A geometric construction is impossible for the given sizes.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Pigeonhole selection found no qualifying index: the caller's
/// aggregate inequality did not hold.
class NoWitnessError : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON input or schema violation.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace tubemeasure
