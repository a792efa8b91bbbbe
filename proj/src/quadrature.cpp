#include "quadint/quadrature.hpp"

#include <cmath>
#include <cstddef>

namespace quadint {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_points(int n) {
  if (n < 1 || n > 64) {
    throw InvalidIndex("quadrature size must be between 1 and 64");
  }
}

// Appends `base` rescaled to [lo, hi] (1D segments of a composite rule).
void append_segment(const GaussNodes1D& base, double lo, double hi,
                    std::vector<double>& x, std::vector<double>& w) {
  const double len = hi - lo;
  for (std::size_t i = 0; i < base.x.size(); ++i) {
    x.push_back(lo + len * base.x[i]);
    w.push_back(len * base.w[i]);
  }
}

}  // namespace

GaussNodes1D gauss_legendre_1d(int n) {
  check_points(n);
  GaussNodes1D out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  out.w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    // Root of P_n on [-1, 1]; the cosine guess brackets the i-th root.
    double z = std::cos(kPi * (i - 0.25) / (n + 0.5));
    double pn = 0.0, pn1 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double pa = 1.0, pb = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double pc = pb;
        pb = pa;
        pa = ((2.0 * j - 1.0) * z * pb - (j - 1.0) * pc) / j;
      }
      pn = pa;
      pn1 = pb;
      dp = n * (z * pn - pn1) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    // Map [-1, 1] to [0, 1]; mirrored pair shares the weight.
    out.x[static_cast<std::size_t>(i - 1)] = (1.0 - z) / 2.0;
    out.x[static_cast<std::size_t>(n - i)] = (1.0 + z) / 2.0;
    const double wi = 1.0 / ((1.0 - z * z) * dp * dp);
    out.w[static_cast<std::size_t>(i - 1)] = wi;
    out.w[static_cast<std::size_t>(n - i)] = wi;
  }
  return out;
}

QuadratureRule gauss_tensor_rule(int n) {
  check_points(n);
  const GaussNodes1D g = gauss_legendre_1d(n);
  QuadratureRule rule;
  rule.kind = RuleKind::SquareTensor;
  rule.order = 2 * n - 1;
  rule.points.reserve(static_cast<std::size_t>(n) * n);
  rule.weights.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      rule.points.push_back({g.x[static_cast<std::size_t>(j)],
                             g.x[static_cast<std::size_t>(i)]});
      rule.weights.push_back(g.w[static_cast<std::size_t>(j)] *
                             g.w[static_cast<std::size_t>(i)]);
    }
  }
  return rule;
}

QuadratureRule triangle_rule(int n) {
  check_points(n);
  const GaussNodes1D g = gauss_legendre_1d(n);
  QuadratureRule rule;
  rule.kind = RuleKind::Triangle;
  // The collapse multiplies the integrand by the linear factor (1 - u), so
  // one degree of x-exactness is spent on it.
  rule.order = 2 * n - 2;
  rule.points.reserve(static_cast<std::size_t>(n) * n);
  rule.weights.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double u = g.x[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double v = g.x[static_cast<std::size_t>(j)];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(g.w[static_cast<std::size_t>(i)] *
                             g.w[static_cast<std::size_t>(j)] * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule graded_tensor_rule(int n, int levels, bool flip_x,
                                  bool flip_y) {
  check_points(n);
  if (levels < 1 || levels > 60) {
    throw InvalidIndex("grading levels must be between 1 and 60");
  }
  const GaussNodes1D g = gauss_legendre_1d(n);
  // Segments [0, 1/2], [1/2, 3/4], ..., [1 - 2^-levels, 1]: geometric
  // refinement toward 1, with the final dyadic cell left unsplit.
  std::vector<double> x1, w1;
  double lo = 0.0;
  for (int m = 1; m <= levels; ++m) {
    const double hi = 1.0 - std::pow(0.5, m);
    append_segment(g, lo, hi, x1, w1);
    lo = hi;
  }
  append_segment(g, lo, 1.0, x1, w1);

  QuadratureRule rule;
  rule.kind = RuleKind::SquareTensor;
  rule.order = 2 * n - 1;
  const std::size_t count = x1.size();
  rule.points.reserve(count * count);
  rule.weights.reserve(count * count);
  for (std::size_t i = 0; i < count; ++i) {
    const double y = flip_y ? 1.0 - x1[i] : x1[i];
    for (std::size_t j = 0; j < count; ++j) {
      const double x = flip_x ? 1.0 - x1[j] : x1[j];
      rule.points.push_back({x, y});
      rule.weights.push_back(w1[j] * w1[i]);
    }
  }
  return rule;
}

}  // namespace quadint
