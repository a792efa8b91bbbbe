#pragma once

#include <vector>

#include "quadint/errors.hpp"
#include "quadint/fields.hpp"
#include "quadint/geometry.hpp"
#include "quadint/linalg.hpp"
#include "quadint/reference_map.hpp"

namespace quadint {

/// Degrees above this are out of scope for the uniform-node Lagrange basis.
inline constexpr int kMaxDegree = 10;

/// 1D Lagrange nodal basis on the uniform nodes {l/k, l=0..k}, evaluated via
/// the barycentric formula with weights precomputed at construction.
class Lagrange1D {
 public:
  explicit Lagrange1D(int k);

  int degree() const { return k_; }
  double node(int j) const;

  /// l_j(t) and l_j'(t) for a single j.
  double value(int j, double t) const;
  double derivative(int j, double t) const;

  /// All k+1 values (resp. derivatives) at t; out must hold k+1 doubles.
  /// Sum of values is exactly 1; sum of derivatives is exactly 0.
  void values(double t, double* out) const;
  void derivatives(double t, double* out) const;

 private:
  int k_;
  std::vector<double> nodes_;
  std::vector<double> w_;  // barycentric weights 1/prod_{m!=j}(x_j - x_m)
};

/// Tensor-product basis phi_ij(x,y) = l_j(x) l_i(y) on the unit square.
/// Flat index is i*(k+1)+j (i outer, j inner).
class QkBasis {
 public:
  explicit QkBasis(int k);

  int degree() const { return k_; }
  int size() const { return (k_ + 1) * (k_ + 1); }
  int flat(int i, int j) const;

  double value(int i, int j, double xh, double yh) const;
  /// (d/dx, d/dy) on the reference square.
  Point2 gradient(int i, int j, double xh, double yh) const;

  /// All size() values (resp. gradients) in flat order.
  void values(double xh, double yh, double* out) const;
  void gradients(double xh, double yh, Point2* out) const;

  const Lagrange1D& line() const { return line_; }

 private:
  int k_;
  Lagrange1D line_;
};

/// Physical interpolation nodes M_ij = F(j/k, i/k), row-major (i outer).
struct NodeGrid {
  int k = 0;
  std::vector<Point2> nodes;

  Point2 at(int i, int j) const;
  /// Interior means 1 <= i,j <= k-1; everything else lies on an edge.
  bool interior(int i, int j) const;
  int count_interior() const { return (k - 1) * (k - 1); }
};

NodeGrid node_grid(const BilinearMap& bm, int k);

enum class AuxKind { TopEdge, RightEdge, Interior };

/// Auxiliary triangle attached to the node M_ij (i != 0 != j).  Edge kinds
/// are similar to the triangle V2 V3 V4 with the stored ratio; the interior
/// kind records its leg lengths and the angle alpha at M_i0.
struct AuxTriangle {
  AuxKind kind = AuxKind::Interior;
  Point2 v[3];      // first vertex is the node M_ij itself
  Point2 probe[2];  // the edge e used in the trace argument
  double ratio = 0.0;   // similarity ratio j/k (top) or i/k (right)
  double leg_a = 0.0;   // interior: |M_i0 M_ij|
  double leg_b = 0.0;   // interior: |M_0j M_ij|
  double alpha = 0.0;   // interior: angle at M_i0 between M_ij and M_0j

  double area() const;
};

/// Builds the triangle for node (i,j); the corner node (k,k) uses the
/// top-edge construction.  Throws InvalidIndex when i == 0 or j == 0.
AuxTriangle aux_triangle(const BilinearMap& bm, int k, int i, int j);

/// Q_k interpolant on a quadrilateral: nodal values at the NodeGrid, value
/// and gradient evaluators at physical points (via map inversion) and at
/// reference points (direct, used by quadrature).
class QkInterpolant {
 public:
  QkInterpolant(const BilinearMap& bm, int k, std::vector<double> nodal);

  int degree() const { return basis_.degree(); }
  const NodeGrid& grid() const { return grid_; }
  const std::vector<double>& nodal_values() const { return vals_; }
  const BilinearMap& map() const { return bm_; }

  /// Value / physical gradient at a physical point inside the element.
  double value(Point2 x) const;
  Point2 gradient(Point2 x) const;

  /// Value / physical gradient at the image of the reference point (xh, yh);
  /// no inversion involved.
  double value_ref(double xh, double yh) const;
  Point2 gradient_ref(double xh, double yh) const;

 private:
  BilinearMap bm_;
  QkBasis basis_;
  NodeGrid grid_;
  std::vector<double> vals_;
};

QkInterpolant qk_interpolate(const BilinearMap& bm, int k, const Field& f);
QkInterpolant qk_interpolate(const CanonicalQuad& cq, int k, const Field& f);

/// Physical gradient of the basis function phi_ij at a physical point,
/// DF^{-T} grad phi_ij evaluated at F^{-1}(point).
Point2 physical_basis_grad(const BilinearMap& bm, int k, int i, int j,
                           Point2 point);
/// Same quantity parameterized by the reference point instead.
Point2 physical_basis_grad_ref(const BilinearMap& bm, int k, int i, int j,
                               double xh, double yh);

/// P_k Lagrange interpolant on the triangle (0,0), (a,0), (0,b); the result
/// is a global polynomial, so evaluation anywhere doubles as the extension.
class TriangleInterpolant {
 public:
  TriangleInterpolant(double a, double b, int k, Poly2 poly,
                      std::vector<Point2> nodes, std::vector<double> nodal);

  int degree() const { return k_; }
  double leg_x() const { return a_; }
  double leg_y() const { return b_; }
  const Poly2& poly() const { return poly_; }
  const std::vector<Point2>& nodes() const { return nodes_; }
  const std::vector<double>& nodal_values() const { return nodal_; }

  double value(Point2 x) const { return poly_.eval(x); }
  Point2 gradient(Point2 x) const;

 private:
  double a_, b_;
  int k_;
  Poly2 poly_, dx_, dy_;
  std::vector<Point2> nodes_;
  std::vector<double> nodal_;
};

/// Interpolates the field at the nodes (a j/k, b i/k), i+j <= k, solving the
/// monomial Vandermonde system with full pivoting.
TriangleInterpolant triangle_pk_interpolate(double a, double b, int k,
                                            const Field& f);

}  // namespace quadint
