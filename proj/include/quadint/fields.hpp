#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "quadint/errors.hpp"
#include "quadint/linalg.hpp"

namespace quadint {

/// Bivariate polynomial sum_ij c[i][j] x^i y^j with exact derivatives.
class Poly2 {
 public:
  Poly2() : c_(1, std::vector<double>(1, 0.0)) {}
  explicit Poly2(std::vector<std::vector<double>> coeffs);

  static Poly2 monomial(int ix, int iy, double c);
  /// sum_i c[i] x^i as a bivariate polynomial (constant in y).
  static Poly2 poly1d_x(const std::vector<double>& c);
  static Poly2 poly1d_y(const std::vector<double>& c);
  /// prod_i (x - r[i]).
  static Poly2 from_roots_x(const std::vector<double>& roots);

  Poly2 operator+(const Poly2& o) const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 scaled(double s) const;
  /// d^{ix+iy} / dx^{ix} dy^{iy}.
  Poly2 derivative(int ix, int iy) const;

  double eval(Point2 p) const;
  int degree_x() const { return static_cast<int>(c_.size()) - 1; }
  int degree_y() const { return static_cast<int>(c_[0].size()) - 1; }
  const std::vector<std::vector<double>>& coeffs() const { return c_; }

 private:
  // Rectangular table, c_[i][j] multiplies x^i y^j; kept non-empty.
  std::vector<std::vector<double>> c_;
};

/// Scalar field with partial derivatives: eval(p, ix, iy) returns
/// d^{ix+iy} f / dx^{ix} dy^{iy} at p.
class Field {
 public:
  virtual ~Field() = default;
  virtual double eval(Point2 p, int ix = 0, int iy = 0) const = 0;
  /// False when derivatives come from finite differences (lower precision).
  virtual bool exact_derivatives() const { return true; }
};

/// Polynomial field; all derivative orders are exact.
class PolyField final : public Field {
 public:
  explicit PolyField(Poly2 p);
  double eval(Point2 p, int ix = 0, int iy = 0) const override;
  const Poly2& poly() const { return p_; }

 private:
  Poly2 p_;
  // Full derivative table indexed by (ix, iy); orders beyond the degree are
  // identically zero and handled without storage.
  std::vector<std::vector<Poly2>> derivs_;
};

/// sin(ax x + px) * sin(by y + py); derivatives of every order are closed
/// form via the quarter-turn phase shift.
class TrigField final : public Field {
 public:
  TrigField(double ax, double px, double by, double py);
  /// Product bump vanishing on the boundary of [x0, x0+w] x [y0, y0+h].
  static TrigField bump_on_box(double x0, double w, double y0, double h);
  double eval(Point2 p, int ix = 0, int iy = 0) const override;

 private:
  double ax_, px_, by_, py_;
};

/// Wraps a callable; derivative orders above max_order raise
/// DerivativeUnavailable.
class CallableField final : public Field {
 public:
  using Fn = std::function<double(Point2, int, int)>;
  CallableField(Fn fn, int max_order);
  double eval(Point2 p, int ix = 0, int iy = 0) const override;

 private:
  Fn fn_;
  int max_order_;
};

/// Value-only callable; derivatives fall back to nested central differences
/// with the given step (callers pass 1e-6 times the element diameter) and
/// are flagged lower-precision.
class NumericField final : public Field {
 public:
  NumericField(std::function<double(Point2)> fn, double step);
  double eval(Point2 p, int ix = 0, int iy = 0) const override;
  bool exact_derivatives() const override { return false; }

 private:
  std::function<double(Point2)> fn_;
  double step_;
};

/// Built-in field registry: "cex1" = x(x-1/2)(x-1), "cex2" =
/// x(x-1/4)(x-3/4)(x-3/8)(x-1), "trig" = sin(pi x) sin(pi y), and
/// "poly:<rows>" with rows split by ';' and y-coefficients by ',' or spaces
/// (row i holds the coefficients of x^i).  Unknown names raise ParseError.
std::unique_ptr<Field> make_field(const std::string& name);

}  // namespace quadint
