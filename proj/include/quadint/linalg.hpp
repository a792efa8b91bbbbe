#pragma once

#include <cmath>

namespace quadint {

/// Point in the plane. Doubles as a 2-vector.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

/// Unsigned angle between two nonzero vectors, in (0, pi).
inline double angle_between(Point2 u, Point2 v) {
  return std::atan2(std::fabs(cross(u, v)), dot(u, v));
}

/// 2x2 matrix, row-major.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  double det() const { return a00 * a11 - a01 * a10; }

  Point2 apply(Point2 v) const {
    return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y};
  }

  /// Solves A x = b.  Caller guarantees det != 0.
  Point2 solve(Point2 b) const {
    const double d = det();
    return {(a11 * b.x - a01 * b.y) / d, (a00 * b.y - a10 * b.x) / d};
  }

  Mat2 inverse() const {
    const double d = det();
    return {a11 / d, -a01 / d, -a10 / d, a00 / d};
  }

  Mat2 mul(const Mat2& o) const {
    return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
            a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
  }

  /// Singular values, largest first.
  void singular_values(double& smax, double& smin) const {
    // Eigenvalues of A^T A via trace/det; A^T A is symmetric PSD.
    const double t = a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11;
    const double d = det();
    const double disc = std::sqrt(std::fmax(t * t - 4.0 * d * d, 0.0));
    smax = std::sqrt(0.5 * (t + disc));
    smin = std::sqrt(std::fmax(0.5 * (t - disc), 0.0));
  }

  double cond() const {
    double smax, smin;
    singular_values(smax, smin);
    return smax / smin;
  }
};

}  // namespace quadint
