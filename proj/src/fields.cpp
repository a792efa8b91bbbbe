#include "quadint/fields.hpp"

#include <algorithm>
#include <cmath>

namespace quadint {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

}  // namespace

Poly2::Poly2(std::vector<std::vector<double>> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_ = {{0.0}};
  std::size_t w = 1;
  for (const auto& row : c_) w = std::max(w, row.size());
  for (auto& row : c_) row.resize(w, 0.0);
}

Poly2 Poly2::monomial(int ix, int iy, double c) {
  std::vector<std::vector<double>> t(
      static_cast<std::size_t>(ix) + 1,
      std::vector<double>(static_cast<std::size_t>(iy) + 1, 0.0));
  t.back().back() = c;
  return Poly2(std::move(t));
}

Poly2 Poly2::poly1d_x(const std::vector<double>& c) {
  std::vector<std::vector<double>> t;
  t.reserve(c.size());
  for (double v : c) t.push_back({v});
  return Poly2(std::move(t));
}

Poly2 Poly2::poly1d_y(const std::vector<double>& c) {
  return Poly2({c});
}

Poly2 Poly2::from_roots_x(const std::vector<double>& roots) {
  Poly2 p = poly1d_x({1.0});
  for (double r : roots) p = p * poly1d_x({-r, 1.0});
  return p;
}

Poly2 Poly2::operator+(const Poly2& o) const {
  std::vector<std::vector<double>> t(
      std::max(c_.size(), o.c_.size()),
      std::vector<double>(std::max(c_[0].size(), o.c_[0].size()), 0.0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < c_[i].size(); ++j) t[i][j] += c_[i][j];
  for (std::size_t i = 0; i < o.c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_[i].size(); ++j) t[i][j] += o.c_[i][j];
  return Poly2(std::move(t));
}

Poly2 Poly2::operator*(const Poly2& o) const {
  std::vector<std::vector<double>> t(
      c_.size() + o.c_.size() - 1,
      std::vector<double>(c_[0].size() + o.c_[0].size() - 1, 0.0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < c_[i].size(); ++j) {
      if (c_[i][j] == 0.0) continue;
      for (std::size_t k = 0; k < o.c_.size(); ++k)
        for (std::size_t l = 0; l < o.c_[k].size(); ++l)
          t[i + k][j + l] += c_[i][j] * o.c_[k][l];
    }
  return Poly2(std::move(t));
}

Poly2 Poly2::scaled(double s) const {
  auto t = c_;
  for (auto& row : t)
    for (auto& v : row) v *= s;
  return Poly2(std::move(t));
}

Poly2 Poly2::derivative(int ix, int iy) const {
  if (ix < 0 || iy < 0) throw InvalidIndex("negative derivative order");
  const auto dx = static_cast<std::size_t>(ix);
  const auto dy = static_cast<std::size_t>(iy);
  if (dx >= c_.size() || dy >= c_[0].size()) return Poly2();
  std::vector<std::vector<double>> t(
      c_.size() - dx, std::vector<double>(c_[0].size() - dy, 0.0));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].size(); ++j) {
      double f = 1.0;
      for (std::size_t m = i + 1; m <= i + dx; ++m) f *= static_cast<double>(m);
      for (std::size_t m = j + 1; m <= j + dy; ++m) f *= static_cast<double>(m);
      t[i][j] = c_[i + dx][j + dy] * f;
    }
  return Poly2(std::move(t));
}

double Poly2::eval(Point2 p) const {
  double acc = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) {
    double row = 0.0;
    for (std::size_t j = c_[i].size(); j-- > 0;) row = row * p.y + c_[i][j];
    acc = acc * p.x + row;
  }
  return acc;
}

PolyField::PolyField(Poly2 p) : p_(std::move(p)) {
  // Every nonzero derivative fits in a (deg_x+1) x (deg_y+1) table; anything
  // beyond is identically zero, so the full table is finite and immutable.
  derivs_.resize(static_cast<std::size_t>(p_.degree_x()) + 1);
  for (std::size_t i = 0; i < derivs_.size(); ++i) {
    derivs_[i].reserve(static_cast<std::size_t>(p_.degree_y()) + 1);
    for (std::size_t j = 0; j <= static_cast<std::size_t>(p_.degree_y()); ++j)
      derivs_[i].push_back(
          p_.derivative(static_cast<int>(i), static_cast<int>(j)));
  }
}

double PolyField::eval(Point2 p, int ix, int iy) const {
  if (ix < 0 || iy < 0) throw InvalidIndex("negative derivative order");
  const auto ux = static_cast<std::size_t>(ix);
  const auto uy = static_cast<std::size_t>(iy);
  if (ux >= derivs_.size() || uy >= derivs_[ux].size()) return 0.0;
  return derivs_[ux][uy].eval(p);
}

TrigField::TrigField(double ax, double px, double by, double py)
    : ax_(ax), px_(px), by_(by), py_(py) {}

TrigField TrigField::bump_on_box(double x0, double w, double y0, double h) {
  constexpr double pi = 3.14159265358979323846;
  return TrigField(pi / w, -pi * x0 / w, pi / h, -pi * y0 / h);
}

double TrigField::eval(Point2 p, int ix, int iy) const {
  if (ix < 0 || iy < 0) throw InvalidIndex("negative derivative order");
  const double fx =
      std::pow(ax_, ix) * std::sin(ax_ * p.x + px_ + ix * kHalfPi);
  const double fy =
      std::pow(by_, iy) * std::sin(by_ * p.y + py_ + iy * kHalfPi);
  return fx * fy;
}

CallableField::CallableField(Fn fn, int max_order)
    : fn_(std::move(fn)), max_order_(max_order) {}

double CallableField::eval(Point2 p, int ix, int iy) const {
  if (ix < 0 || iy < 0) throw InvalidIndex("negative derivative order");
  if (ix + iy > max_order_)
    throw DerivativeUnavailable("derivative order not provided by callable");
  return fn_(p, ix, iy);
}

NumericField::NumericField(std::function<double(Point2)> fn, double step)
    : fn_(std::move(fn)), step_(step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw PreconditionFailed("difference step must be positive");
}

double NumericField::eval(Point2 p, int ix, int iy) const {
  if (ix < 0 || iy < 0) throw InvalidIndex("negative derivative order");
  if (ix > 0)
    return (eval({p.x + step_, p.y}, ix - 1, iy) -
            eval({p.x - step_, p.y}, ix - 1, iy)) /
           (2.0 * step_);
  if (iy > 0)
    return (eval({p.x, p.y + step_}, ix, iy - 1) -
            eval({p.x, p.y - step_}, ix, iy - 1)) /
           (2.0 * step_);
  return fn_(p);
}

namespace {

Poly2 parse_poly_rows(const std::string& spec) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(';', start);
    if (end == std::string::npos) end = spec.size();
    std::string token = spec.substr(start, end - start);
    for (char& c : token)
      if (c == ',') c = ' ';
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < token.size()) {
      while (pos < token.size() && token[pos] == ' ') ++pos;
      if (pos >= token.size()) break;
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(token.substr(pos), &used);
      } catch (const std::exception&) {
        throw ParseError("bad polynomial coefficient");
      }
      row.push_back(v);
      pos += used;
    }
    rows.push_back(std::move(row));
    start = end + 1;
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw ParseError("empty polynomial spec");
  return Poly2(std::move(rows));
}

}  // namespace

std::unique_ptr<Field> make_field(const std::string& name) {
  constexpr double pi = 3.14159265358979323846;
  if (name == "cex1")
    return std::make_unique<PolyField>(Poly2::from_roots_x({0.0, 0.5, 1.0}));
  if (name == "cex2")
    return std::make_unique<PolyField>(
        Poly2::from_roots_x({0.0, 0.25, 0.75, 0.375, 1.0}));
  if (name == "trig")
    return std::make_unique<TrigField>(pi, 0.0, pi, 0.0);
  if (name.rfind("poly:", 0) == 0)
    return std::make_unique<PolyField>(parse_poly_rows(name.substr(5)));
  throw ParseError("unknown field: " + name);
}

}  // namespace quadint
