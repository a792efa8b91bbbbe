#pragma once

#include <cstddef>

#include "quadint/geometry.hpp"

namespace quadint {

/// Bilinear map F from the unit square onto a convex quad:
///   F(xh, yh) = V1 + xh e1 + yh e2 + xh yh g,
/// e1 = V2-V1, e2 = V4-V1, g = V1-V2+V3-V4.  det DF is affine in (xh, yh)
/// and strictly positive on the closed square for strictly convex quads.
class BilinearMap {
 public:
  explicit BilinearMap(const ConvexQuad& quad);
  explicit BilinearMap(const CanonicalQuad& canonical);

  const ConvexQuad& quad() const { return quad_; }

  Point2 forward(Point2 ref) const;
  /// DF at ref; columns are the images of the reference axes.
  Mat2 jacobian(Point2 ref) const;
  /// det DF at ref.
  double jacobian_det(Point2 ref) const;

  /// Newton inversion from the clamped affine-part guess.  Accepts residuals
  /// up to 1e-12 h; preimages outside [-1e-10, 1 + 1e-10]^2 raise
  /// NotInElement, stalled iterations raise NoConvergence.  The returned
  /// point is clamped into the closed unit square.
  Point2 inverse(Point2 phys) const;

  /// Physical gradient from the reference one at ref (inverse-transpose).
  Point2 pullback_gradient(Point2 ref, Point2 ref_grad) const;

  /// Batched forward map and Jacobian determinant (kernel-dispatched).
  void forward_batch(const double* xh, const double* yh, double* x, double* y,
                     std::size_t n) const;
  void jacobian_det_batch(const double* xh, const double* yh, double* out,
                          std::size_t n) const;

 private:
  ConvexQuad quad_;
  Point2 v1_, e1_, e2_, g_;
  double j0_, jx_, jy_;  // det DF = j0 + jx xh + jy yh
};

}  // namespace quadint
