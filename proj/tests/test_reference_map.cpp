#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "quadint/reference_map.hpp"
#include "testutil.hpp"

using namespace quadint;
using testutil::Rng;

namespace {

// Closed-form inverse on a family element: yh solves the quadratic
// b(at-a) v^2 + [ab + (bt-b)x - (at-a)y] v - ay = 0 and xh follows from
// x = xh (a + yh (at-a)).  Independent of the library's Newton iteration.
Point2 quadratic_inverse(const CanonicalQuad& c, Point2 p) {
  const double A = c.b() * (c.at() - c.a());
  const double B =
      c.a() * c.b() + (c.bt() - c.b()) * p.x - (c.at() - c.a()) * p.y;
  const double C = -c.a() * p.y;
  double v;
  if (std::fabs(A) < 1e-14 * c.a() * c.b()) {
    v = -C / B;
  } else {
    const double disc = std::sqrt(B * B - 4.0 * A * C);
    const double qq = -0.5 * (B + (B >= 0 ? disc : -disc));
    const double r1 = qq / A;
    const double r2 = C / qq;
    v = (r1 >= -1e-12 && r1 <= 1.0 + 1e-12) ? r1 : r2;
  }
  const double u = p.x / (c.a() + (c.at() - c.a()) * v);
  return {u, v};
}

}  // namespace

TEST_CASE("forward map hits vertices and is affine on edges") {
  Rng rng(51);
  for (int t = 0; t < 100; ++t) {
    const ConvexQuad q = testutil::random_convex_quad(rng);
    const BilinearMap F(q);
    const Point2 corners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int i = 0; i < 4; ++i)
      CHECK(dist(F.forward(corners[i]), q.vertex(i)) <= 1e-12 * q.h());
    // Edge restrictions are affine: midpoints of ref edges map to midpoints
    // of physical sides.
    for (int i = 0; i < 4; ++i) {
      const Point2 mid_ref = 0.5 * (corners[i] + corners[(i + 1) % 4]);
      const Point2 mid_phys = 0.5 * (q.vertex(i) + q.vertex(i + 1));
      CHECK(dist(F.forward(mid_ref), mid_phys) <= 1e-12 * q.h());
    }
  }
}

TEST_CASE("jacobian matches central differences") {
  Rng rng(53);
  for (int t = 0; t < 50; ++t) {
    const ConvexQuad q = testutil::random_convex_quad(rng);
    const BilinearMap F(q);
    for (int s = 0; s < 5; ++s) {
      const Point2 r{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      const double eps = 1e-6;
      const Point2 dx =
          (0.5 / eps) * (F.forward({r.x + eps, r.y}) - F.forward({r.x - eps, r.y}));
      const Point2 dy =
          (0.5 / eps) * (F.forward({r.x, r.y + eps}) - F.forward({r.x, r.y - eps}));
      const Mat2 J = F.jacobian(r);
      const double scale = q.h();
      CHECK(std::fabs(J.a00 - dx.x) <= 1e-7 * scale);
      CHECK(std::fabs(J.a10 - dx.y) <= 1e-7 * scale);
      CHECK(std::fabs(J.a01 - dy.x) <= 1e-7 * scale);
      CHECK(std::fabs(J.a11 - dy.y) <= 1e-7 * scale);
      CHECK(F.jacobian_det(r) == doctest::Approx(J.det()).epsilon(1e-12));
    }
  }
}

TEST_CASE("jacobian determinant is affine and corner-positive") {
  Rng rng(59);
  for (int t = 0; t < 100; ++t) {
    const ConvexQuad q = testutil::random_convex_quad(rng);
    const BilinearMap F(q);
    const double j00 = F.jacobian_det({0, 0});
    const double j10 = F.jacobian_det({1, 0});
    const double j01 = F.jacobian_det({0, 1});
    const double j11 = F.jacobian_det({1, 1});
    CHECK(j00 > 0.0);
    CHECK(j10 > 0.0);
    CHECK(j01 > 0.0);
    CHECK(j11 > 0.0);
    CHECK(j11 == doctest::Approx(j10 + j01 - j00).epsilon(1e-10));
    const Point2 r{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    CHECK(F.jacobian_det(r) ==
          doctest::Approx(j00 + r.x * (j10 - j00) + r.y * (j01 - j00))
              .epsilon(1e-12));
  }
}

TEST_CASE("canonical jacobian closed form") {
  Rng rng(61);
  for (int t = 0; t < 200; ++t) {
    const CanonicalQuad c = testutil::random_canonical(rng, 0.05, 3.0);
    const BilinearMap F(c);
    const Point2 r{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    const double want = c.a() * c.b() *
                        (1.0 + r.x * (c.bt() / c.b() - 1.0) +
                         r.y * (c.at() / c.a() - 1.0));
    CHECK(F.jacobian_det(r) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("newton inverse agrees with the quadratic closed form") {
  Rng rng(67);
  for (int t = 0; t < 200; ++t) {
    const CanonicalQuad c = testutil::random_canonical(rng, 0.05, 3.0);
    const BilinearMap F(c);
    const Point2 ref{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    const Point2 p = F.forward(ref);
    const Point2 got = F.inverse(p);
    const Point2 oracle = quadratic_inverse(c, p);
    CHECK(std::fabs(got.x - oracle.x) <= 1e-11);
    CHECK(std::fabs(got.y - oracle.y) <= 1e-11);
    CHECK(std::fabs(got.x - ref.x) <= 1e-11);
    CHECK(std::fabs(got.y - ref.y) <= 1e-11);
  }
}

TEST_CASE("inverse round trips on arbitrary quads") {
  Rng rng(71);
  for (int t = 0; t < 100; ++t) {
    const ConvexQuad q = testutil::random_convex_quad(rng);
    const BilinearMap F(q);
    for (int s = 0; s < 5; ++s) {
      const Point2 ref{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      const Point2 back = F.inverse(F.forward(ref));
      CHECK(std::fabs(back.x - ref.x) <= 1e-11);
      CHECK(std::fabs(back.y - ref.y) <= 1e-11);
    }
    // Physical points round trip too.
    const Point2 inside = F.forward({0.3, 0.7});
    CHECK(dist(F.forward(F.inverse(inside)), inside) <= 1e-11 * q.h());
  }
}

TEST_CASE("inverse rejects exterior points") {
  const ConvexQuad sq({Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}});
  const BilinearMap F(sq);
  CHECK_THROWS_AS(F.inverse({2.0, 0.5}), NotInElement);
  CHECK_THROWS_AS(F.inverse({-0.5, 0.5}), NotInElement);
  CHECK_THROWS_AS(F.inverse({0.5, 1.5}), NotInElement);
  // Boundary points are accepted and clamped.
  const Point2 edge = F.inverse({0.5, 1.0});
  CHECK(edge.y == doctest::Approx(1.0));
}

TEST_CASE("pullback gradient recovers affine physical gradients") {
  Rng rng(73);
  for (int t = 0; t < 100; ++t) {
    const ConvexQuad q = testutil::random_convex_quad(rng);
    const BilinearMap F(q);
    const double cx = rng.uniform(-2, 2), cy = rng.uniform(-2, 2);
    const Point2 r{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    // Reference gradient of (c . F)(ref) is DF^T c.
    const Mat2 J = F.jacobian(r);
    const Point2 ref_grad{J.a00 * cx + J.a10 * cy, J.a01 * cx + J.a11 * cy};
    const Point2 back = F.pullback_gradient(r, ref_grad);
    CHECK(back.x == doctest::Approx(cx).epsilon(1e-10));
    CHECK(back.y == doctest::Approx(cy).epsilon(1e-10));
  }
}

TEST_CASE("batched map agrees with scalar calls") {
  Rng rng(79);
  const ConvexQuad q = testutil::random_convex_quad(rng);
  const BilinearMap F(q);
  const std::size_t n = 137;
  std::vector<double> xh(n), yh(n), x(n), y(n), jd(n);
  for (std::size_t i = 0; i < n; ++i) {
    xh[i] = rng.uniform(0.0, 1.0);
    yh[i] = rng.uniform(0.0, 1.0);
  }
  F.forward_batch(xh.data(), yh.data(), x.data(), y.data(), n);
  F.jacobian_det_batch(xh.data(), yh.data(), jd.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = F.forward({xh[i], yh[i]});
    CHECK(x[i] == doctest::Approx(p.x).epsilon(1e-13));
    CHECK(y[i] == doctest::Approx(p.y).epsilon(1e-13));
    CHECK(jd[i] == doctest::Approx(F.jacobian_det({xh[i], yh[i]})).epsilon(1e-13));
  }
}
