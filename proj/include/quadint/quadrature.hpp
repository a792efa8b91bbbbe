#pragma once

#include <vector>

#include "quadint/errors.hpp"
#include "quadint/linalg.hpp"

namespace quadint {

/// Gauss-Legendre nodes and weights on [0, 1]; weights sum to 1.
struct GaussNodes1D {
  std::vector<double> x, w;
};

/// Nodes by Newton iteration on the Legendre recurrence; exact for
/// polynomials of degree 2n-1.  1 <= n <= 64.
GaussNodes1D gauss_legendre_1d(int n);

enum class RuleKind { SquareTensor, Triangle };

/// Positive-weight rule on the unit square (weights sum to 1) or the unit
/// triangle x, y >= 0, x + y <= 1 (weights sum to 1/2).  order is the
/// guaranteed polynomial exactness degree.
struct QuadratureRule {
  RuleKind kind = RuleKind::SquareTensor;
  int order = 0;
  std::vector<Point2> points;
  std::vector<double> weights;
};

/// n^2-point tensor rule, exact for Q_{2n-1}.
QuadratureRule gauss_tensor_rule(int n);

/// n^2-point rule on the unit triangle via the Duffy collapse
/// (x, y) = (u, v(1-u)); exact for total degree 2n-2.
QuadratureRule triangle_rule(int n);

/// Composite tensor rule graded toward one corner of the square: each axis
/// is split at the dyadic breakpoints 1 - 2^-m, m = 1..levels, and carries
/// the n-point rule per segment.  flip_x / flip_y move the accumulation
/// corner from (1,1) to the other corners.  ((levels+1) n)^2 points.
QuadratureRule graded_tensor_rule(int n, int levels, bool flip_x = false,
                                  bool flip_y = false);

}  // namespace quadint
