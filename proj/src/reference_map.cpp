#include "quadint/reference_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadint/kernels.hpp"

namespace quadint {

BilinearMap::BilinearMap(const ConvexQuad& quad) : quad_(quad) {
  const auto& v = quad_.vertices();
  v1_ = v[0];
  e1_ = v[1] - v[0];
  e2_ = v[3] - v[0];
  g_ = v[0] - v[1] + v[2] - v[3];
  j0_ = cross(e1_, e2_);
  jx_ = cross(e1_, g_);
  jy_ = cross(g_, e2_);
}

BilinearMap::BilinearMap(const CanonicalQuad& canonical)
    : BilinearMap(canonical.to_quad()) {}

Point2 BilinearMap::forward(Point2 r) const {
  return v1_ + r.x * e1_ + r.y * e2_ + (r.x * r.y) * g_;
}

Mat2 BilinearMap::jacobian(Point2 r) const {
  return {e1_.x + r.y * g_.x, e2_.x + r.x * g_.x,
          e1_.y + r.y * g_.y, e2_.y + r.x * g_.y};
}

double BilinearMap::jacobian_det(Point2 r) const {
  return j0_ + jx_ * r.x + jy_ * r.y;
}

Point2 BilinearMap::inverse(Point2 p) const {
  const double h = quad_.h();
  Point2 q = Mat2{e1_.x, e2_.x, e1_.y, e2_.y}.solve(p - v1_);
  q.x = std::clamp(q.x, 0.0, 1.0);
  q.y = std::clamp(q.y, 0.0, 1.0);

  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    const Point2 r = forward(q) - p;
    res = norm(r);
    if (res <= 1e-14 * h) break;
    q = q - jacobian(q).solve(r);
  }
  res = norm(forward(q) - p);
  if (!(res <= 1e-12 * h))
    throw NoConvergence("bilinear inverse did not reach its residual target",
                        res);
  if (q.x < -1e-10 || q.x > 1.0 + 1e-10 || q.y < -1e-10 || q.y > 1.0 + 1e-10)
    throw NotInElement("preimage lies outside the reference square");
  return {std::clamp(q.x, 0.0, 1.0), std::clamp(q.y, 0.0, 1.0)};
}

Point2 BilinearMap::pullback_gradient(Point2 r, Point2 ref_grad) const {
  const Mat2 J = jacobian(r);
  const Mat2 Jt{J.a00, J.a10, J.a01, J.a11};
  return Jt.solve(ref_grad);
}

void BilinearMap::forward_batch(const double* xh, const double* yh, double* x,
                                double* y, std::size_t n) const {
  const double cx[4] = {v1_.x, e1_.x, e2_.x, g_.x};
  const double cy[4] = {v1_.y, e1_.y, e2_.y, g_.y};
  kernels::bilinear_forward(xh, yh, cx, cy, x, y, n);
}

void BilinearMap::jacobian_det_batch(const double* xh, const double* yh,
                                     double* out, std::size_t n) const {
  kernels::affine_eval(xh, yh, j0_, jx_, jy_, out, n);
}

}  // namespace quadint
