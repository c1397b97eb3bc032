#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bvdeg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the range an operation accepts (slice position,
/// axis index, epsilon, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed field descriptor or payload. `offset` is the byte offset into the
/// offending file (descriptor or data) where the problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Query point lies on the polyline within tolerance.
class OnBoundary : public Error {
 public:
  using Error::Error;
};

/// The query point is too close to the sampled boundary image for the
/// winding number to be trusted. Refine the boundary resolution.
class UnstableDegree : public Error {
 public:
  using Error::Error;
};

/// Too much of a raster had to be skipped because of boundary proximity.
class DegenerateBoundary : public Error {
 public:
  using Error::Error;
};

class InversionFailure : public Error {
 public:
  using Error::Error;
};

class NonInjective : public Error {
 public:
  using Error::Error;
};

}  // namespace bvdeg
