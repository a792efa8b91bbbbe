#pragma once

#include <array>

#include "quadint/errors.hpp"
#include "quadint/linalg.hpp"

namespace quadint {

/// Strictly convex quadrilateral with counter-clockwise vertices.
/// Construction validates convexity (each cross product of consecutive edges
/// must exceed 1e-12 * h^2); failing quads are rejected, never repaired.
class ConvexQuad {
 public:
  explicit ConvexQuad(const std::array<Point2, 4>& vertices);

  const std::array<Point2, 4>& vertices() const { return v_; }
  Point2 vertex(int i) const { return v_[static_cast<std::size_t>(i & 3)]; }

  /// Diameter: max pairwise vertex distance.
  double h() const { return h_; }
  /// Shortest side length.
  double s_len() const { return s_len_; }
  /// Index in [0,4) of the shortest side (side i joins vertex i and i+1).
  int shortest_side() const { return s_idx_; }
  /// Diagonal V1V3.
  double d1_len() const { return d1_; }
  /// Diagonal V2V4.
  double d2_len() const { return d2_; }
  double area() const { return area_; }

  double side_len(int i) const;
  /// True if the point lies in the closed quad, within tol * h slack.
  bool contains(Point2 p, double tol = 1e-10) const;

 private:
  std::array<Point2, 4> v_;
  double h_ = 0.0, s_len_ = 0.0, d1_ = 0.0, d2_ = 0.0, area_ = 0.0;
  int s_idx_ = 0;
};

/// Element K(a, b, at, bt) with vertices (0,0), (a,0), (at,bt), (0,b).
/// Convexity certificate: at/a + bt/b - 1 > 0.
class CanonicalQuad {
 public:
  CanonicalQuad(double a, double b, double at, double bt);

  double a() const { return a_; }
  double b() const { return b_; }
  double at() const { return at_; }
  double bt() const { return bt_; }

  /// at/a + bt/b - 1, strictly positive.
  double certificate() const { return at_ / a_ + bt_ / b_ - 1.0; }
  /// Length of the side joining (at,bt) and (0,b).
  double l_len() const { return l_len_; }
  /// Angle at V4 = (0,b) of the triangle (V2, V3, V4), in (0, pi).
  double alpha() const { return alpha_; }

  ConvexQuad to_quad() const;

 private:
  double a_, b_, at_, bt_;
  double l_len_, alpha_;
};

/// Affine map x -> B x + p.  kappa is the spectral condition number of B.
/// det(B) < 0 (an isometric reflection factor) appears exactly where a
/// labeling swap is forced: placing the shortest side for the Rdp-style
/// targets, and the normalize-tall branch of the Dac target.
struct AffineMap2 {
  Mat2 B;
  Point2 p;
  double kappa = 1.0;

  Point2 apply(Point2 x) const { return B.apply(x) + p; }
  Point2 apply_inverse(Point2 x) const { return B.solve(x - p); }
};

/// One condition flag: whether it holds at threshold C, and the attained
/// constant. "holds" uses a relative slack of 1e-12.
struct FlagResult {
  bool holds = false;
  double attained = 0.0;
};

/// Flags for the canonical-family conditions.
///  delta1: at/a, bt/b <= C          d1: at/a, bt/b <= 1
///  d2:     1/sin(alpha) <= C        delta2: |l| <= C * (shortest side)
///  d3:     a/b, b/a <= C
struct ConditionFlags {
  FlagResult delta1, d1, d2, delta2, d3;
};

/// Decomposition by one diagonal: index 1 = V1V3, index 2 = V2V4.
/// ratio_n = |other diagonal| / |chosen diagonal|; psi_max is the largest
/// angle over both sub-triangles.
struct RdpResult {
  int diagonal = 1;
  double ratio_n = 1.0;
  double psi_max = 0.0;
};

/// Geometric classification of a quad.
struct ConditionReport {
  double psi_min = 0.0;
  double psi_max = 0.0;
  bool mac = false;  // psi_min >= psi_m
  bool MAC = false;  // psi_max <= psi_M
  bool DAC = false;  // both
  RdpResult rdp;
  double h_over_rho = 0.0;
  ConditionFlags flags;  // evaluated on the DAC-canonicalized element
};

enum class CanonicalTarget { Rdp, Regular, Dac, MacOnly };

/// Interior angles at V1..V4, each in (0, pi); they sum to 2*pi.
std::array<double, 4> interior_angles(const ConvexQuad& q);

/// Both single-diagonal decompositions of q.  [0] splits by V1V3, [1] by V2V4.
std::array<RdpResult, 2> rdp_candidates(const ConvexQuad& q);

/// Preferred decomposition: smaller psi_max, then smaller ratio_n, then
/// diagonal 1.  Every convex quad admits one, so this always succeeds.
RdpResult check_rdp(const ConvexQuad& q);

/// h / rho, where rho is the diameter of the largest inscribed circle
/// (Chebyshev center, exact solve over side triples).  Always >= 1.
double regularity_ratio(const ConvexQuad& q);

/// Attained constants for the canonical-family conditions at threshold C
/// (C = 1 is implied for d1).
ConditionFlags condition_flags(const CanonicalQuad& cq, double C);

/// Certified two-way implication between [delta1, d2] and [delta2, d2]:
/// checks attained_delta2 <= C2 * max(2 * attained_delta1, 1) and
/// attained_delta1 <= 1 + attained_delta2.  Test oracle, not production logic.
bool equivalence_check(const CanonicalQuad& cq);

/// Full classification. mac/MAC thresholds are psi_m / psi_M; flags are
/// evaluated at threshold flag_c on the Dac-target canonicalization.
ConditionReport classify(const ConvexQuad& q, double psi_m, double psi_M,
                         double flag_c = 2.0);

struct CanonicalizeResult {
  CanonicalQuad canonical;
  AffineMap2 map;  // map.apply(canonical vertex) reproduces an input vertex
};

/// Maps q onto a family element K(a,b,at,bt) by vertex choice + shear, per
/// target recipe:
///   Rdp/Regular: origin at the apex of the triangle (of the check_rdp split)
///     not containing the shortest side; the side opposite the shortest side
///     goes on the x axis.
///   MacOnly: same construction, diagonal forced to the longest one.
///   Dac: origin at a vertex whose adjacent-sides parallelogram contains q
///     (max sin(angle) among qualifiers), then normalize-tall, so the result
///     satisfies d1 and bt/b >= 1/2.
CanonicalizeResult canonicalize(const ConvexQuad& q, CanonicalTarget target);

/// Swap K(a,b,at,bt) -> K(b,a,bt,at).  Keeps the side-length multiset and the
/// delta1 constant; never worsens 1/sin(alpha) when bt/b < 1/2.
CanonicalQuad normalize_tall(const CanonicalQuad& cq);

struct AngleBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Range that an angle `ang` can be distorted into by `map`:
/// [2*ang/(kappa*pi), pi*(1 - 2/(kappa*pi)) + 2*ang/(kappa*pi)].
AngleBounds angle_distortion_bounds(const AffineMap2& map, double ang);

}  // namespace quadint
