#pragma once

#include <stdexcept>
#include <string>

namespace quadint {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input quad is non-convex, non-CCW, has duplicate vertices or non-finite
/// coordinates.
struct DegenerateQuad : Error {
  using Error::Error;
};

/// Point lies outside the closed element (beyond tolerance).
struct NotInElement : Error {
  using Error::Error;
};

/// Newton inversion of the bilinear map failed to reach its residual target.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, double residual_)
      : Error(what), residual(residual_) {}
  double residual;
};

/// Requested node or basis index is out of range for the given degree.
struct InvalidIndex : Error {
  using Error::Error;
};

/// Triangle interpolation nodes produced a singular Vandermonde system.
struct DegenerateTriangle : Error {
  using Error::Error;
};

/// A documented precondition does not hold for the given arguments.
struct PreconditionFailed : Error {
  using Error::Error;
};

/// Derivatives of the requested order are not available for this function.
struct DerivativeUnavailable : Error {
  using Error::Error;
};

/// Canonicalization could not produce a valid family element.
struct ConstructionFailed : Error {
  using Error::Error;
};

/// Sweep grid parameter lies outside the family's validity interval.
struct GridOutOfRange : Error {
  using Error::Error;
};

/// Malformed text input (quad files, field specs, CLI values).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace quadint
