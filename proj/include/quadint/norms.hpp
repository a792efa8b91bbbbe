#pragma once

#include <array>

#include "quadint/errors.hpp"
#include "quadint/fields.hpp"
#include "quadint/geometry.hpp"
#include "quadint/interpolation.hpp"
#include "quadint/quadrature.hpp"
#include "quadint/reference_map.hpp"

namespace quadint {

/// Norm (or integral) value plus quadrature diagnostics.  Values come from
/// the finer of two Gauss passes and are flagged converged when the passes
/// agree to 1e-8 relative; order 0 marks a closed-form evaluation.
struct NormResult {
  double value = 0.0;
  double p = 2.0;
  int order = 0;           // points per direction of the accepted pass
  double est_error = 0.0;  // relative difference between the two passes
  bool converged = false;
  bool near_singular = false;  // integrand denominator nearly vanishes
};

/// (int_K |f|^p dx)^{1/p}, pulled back to the reference square with
/// weight |J|.  p in [1, 64]; n is the coarse points-per-direction count.
NormResult lp_norm(const Field& f, const BilinearMap& bm, double p, int n = 8);

/// (int_K |f_x|^p + |f_y|^p dx)^{1/p}.
NormResult w1p_seminorm(const Field& f, const BilinearMap& bm, double p,
                        int n = 8);

/// (int_K sum_{ix+iy=m} |d^m f / dx^ix dy^iy|^p dx)^{1/p}.
NormResult wmp_seminorm(const Field& f, const BilinearMap& bm, int m, double p,
                        int n = 8);

/// Interpolant norms evaluated on the reference side (no map inversion).
/// n = 0 selects the degree-adapted default k + 6.
NormResult lp_norm(const QkInterpolant& qi, double p, int n = 0);
NormResult w1p_seminorm(const QkInterpolant& qi, double p, int n = 0);

/// Interpolation errors ||u - Q_k u||_{0,p,K} and |u - Q_k u|_{1,p,K}.
NormResult lp_error(const Field& u, const QkInterpolant& qi, double p,
                    int n = 0);
NormResult w1p_error(const Field& u, const QkInterpolant& qi, double p,
                     int n = 0);

/// L^p norm of one component (0 = x, 1 = y) of the physical gradient of the
/// basis function attached to node (i, j).
NormResult lp_norm_basis_grad(const BilinearMap& bm, int k, int i, int j,
                              int comp, double p, int n = 0);

/// L^p norm of one component of the interpolant's physical gradient.
NormResult lp_norm_grad_component(const QkInterpolant& qi, int comp, double p,
                                  int n = 0);

/// Norms over a physical triangle (affine pullback of a Duffy rule).
NormResult lp_norm_triangle(const Field& f, const std::array<Point2, 3>& tri,
                            double p, int n = 8);
NormResult w1p_seminorm_triangle(const Field& f,
                                 const std::array<Point2, 3>& tri, double p,
                                 int n = 8);

/// I_p = int int (1 + xh (bt/b - 1) + yh (at/a - 1))^{1-p} dxh dyh over the
/// unit square.  Closed form (order 0) for integer p away from the
/// parallelogram case; Gauss quadrature otherwise, graded toward (1,1) when
/// the convexity certificate drops below 1e-6.  near_singular flags
/// certificates below 1e-12.
NormResult ip_integral(const CanonicalQuad& cq, double p);

/// Empirical constant of the basis-gradient bound |phi_ij|_{1,p,K} <=
/// C h^{1/p} / len^{1/q} for the node (i, j), where len is |l| for boundary
/// nodes and a for internal ones and q is the conjugate exponent.
struct EstphiCertificate {
  double lhs = 0.0;        // |phi_ij|_{1,p,K}
  double rhs_scale = 0.0;  // h^{1/p}/|l|^{1/q} or h^{1/p}/a^{1/q}
  double ratio = 0.0;      // lhs / rhs_scale, the recorded constant
  char case_label = '-';   // hypothesis set that applied, 'a'..'d'
  bool covered = false;    // some hypothesis set holds at threshold flag_c
  bool converged = false;
};

/// Cases: (a) boundary node, p < 3, [delta1, d2]; (b) internal node, p < 3,
/// [delta1, d2, d3]; (c) internal node, any p, [d1, d2]; (d) boundary node,
/// any p, [d1, d2].  The stronger-hypothesis cases (c)/(d) win when both
/// apply.  With enforce_flags set, throws PreconditionFailed when no case
/// covers the request; otherwise the certificate is computed anyway and
/// covered stays false (divergence studies need exactly those ratios).
EstphiCertificate certify_estphi(const CanonicalQuad& cq, int k, double p,
                                 int i, int j, double flag_c = 2.0,
                                 bool enforce_flags = true);

/// Edge-trace inequality on a triangle.
struct TraceCheck {
  double lhs = 0.0;  // ||f||_{0,p,e}
  double rhs = 0.0;  // 2^{1/q} (|e|/|T|)^{1/p} (||f||_{0,p,T} + h_T |f|_{1,p,T})
  bool ok = false;   // lhs <= rhs (1 + 1e-9)
};

/// Edge i joins tri[i] to tri[(i+1) % 3].
TraceCheck trace_inequality_check(const std::array<Point2, 3>& tri, int edge,
                                  const Field& f, double p, int n = 16);

}  // namespace quadint
