#include "quadint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quadint {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double triangle_max_angle(Point2 a, Point2 b, Point2 c) {
  const double aa = angle_between(b - a, c - a);
  const double ab = angle_between(a - b, c - b);
  return std::max({aa, ab, kPi - aa - ab});
}

}  // namespace

ConvexQuad::ConvexQuad(const std::array<Point2, 4>& vertices) : v_(vertices) {
  for (const auto& p : v_)
    if (!finite(p)) throw DegenerateQuad("quad has non-finite coordinates");

  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) h_ = std::max(h_, dist(v_[i], v_[j]));
  if (h_ <= 0.0) throw DegenerateQuad("quad has coincident vertices");

  // Strict convexity and CCW orientation in one pass.
  const double tol = 1e-12 * h_ * h_;
  double area2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point2 e0 = v_[(i + 1) & 3] - v_[i];
    const Point2 e1 = v_[(i + 2) & 3] - v_[(i + 1) & 3];
    const double c = cross(e0, e1);
    if (c <= tol)
      throw DegenerateQuad(c < -tol ? "quad is not convex CCW"
                                    : "quad is degenerate (collinear edges)");
    area2 += cross(v_[i], v_[(i + 1) & 3]);
  }
  area_ = 0.5 * area2;

  s_len_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const double len = side_len(i);
    if (len < s_len_) {
      s_len_ = len;
      s_idx_ = i;
    }
  }
  d1_ = dist(v_[0], v_[2]);
  d2_ = dist(v_[1], v_[3]);
}

double ConvexQuad::side_len(int i) const {
  return dist(v_[static_cast<std::size_t>(i & 3)],
              v_[static_cast<std::size_t>((i + 1) & 3)]);
}

bool ConvexQuad::contains(Point2 p, double tol) const {
  for (int i = 0; i < 4; ++i) {
    const Point2 e = v_[(i + 1) & 3] - v_[i];
    if (cross(e, p - v_[i]) < -tol * h_ * norm(e)) return false;
  }
  return true;
}

CanonicalQuad::CanonicalQuad(double a, double b, double at, double bt)
    : a_(a), b_(b), at_(at), bt_(bt) {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(at) &&
        std::isfinite(bt)) ||
      a <= 0.0 || b <= 0.0 || at <= 0.0 || bt <= 0.0)
    throw DegenerateQuad("canonical parameters must be positive finite");
  if (!(certificate() > 0.0))
    throw DegenerateQuad("canonical element violates at/a + bt/b > 1");
  l_len_ = std::hypot(at_, b_ - bt_);
  alpha_ = angle_between({at_, bt_ - b_}, {a_, -b_});
}

ConvexQuad CanonicalQuad::to_quad() const {
  return ConvexQuad({Point2{0.0, 0.0}, Point2{a_, 0.0}, Point2{at_, bt_},
                     Point2{0.0, b_}});
}

std::array<double, 4> interior_angles(const ConvexQuad& q) {
  std::array<double, 4> out{};
  const auto& v = q.vertices();
  for (int i = 0; i < 4; ++i) {
    const Point2 u = v[(i + 1) & 3] - v[i];
    const Point2 w = v[(i + 3) & 3] - v[i];
    out[static_cast<std::size_t>(i)] = std::atan2(cross(u, w), dot(u, w));
  }
  return out;
}

std::array<RdpResult, 2> rdp_candidates(const ConvexQuad& q) {
  const auto& v = q.vertices();
  std::array<RdpResult, 2> out{};
  for (int d = 0; d < 2; ++d) {
    // Diagonal joins v[d] and v[d+2]; triangles take the two leftover corners.
    const double own = dist(v[d], v[d + 2]);
    const double other = dist(v[(d + 1) & 3], v[(d + 3) & 3]);
    RdpResult r;
    r.diagonal = d + 1;
    r.ratio_n = other / own;
    r.psi_max = std::max(
        triangle_max_angle(v[d], v[(d + 1) & 3], v[d + 2]),
        triangle_max_angle(v[d + 2], v[(d + 3) & 3], v[d]));
    out[static_cast<std::size_t>(d)] = r;
  }
  return out;
}

RdpResult check_rdp(const ConvexQuad& q) {
  const auto cands = rdp_candidates(q);
  const double tol = 1e-12;
  if (std::fabs(cands[0].psi_max - cands[1].psi_max) > tol)
    return cands[0].psi_max < cands[1].psi_max ? cands[0] : cands[1];
  if (std::fabs(cands[0].ratio_n - cands[1].ratio_n) > tol)
    return cands[0].ratio_n < cands[1].ratio_n ? cands[0] : cands[1];
  return cands[0];
}

namespace {

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

double regularity_ratio(const ConvexQuad& q) {
  const auto& v = q.vertices();
  // Inward half-plane form of each side: dot(n[i], x) - off[i] >= 0 inside.
  Point2 n[4];
  double off[4];
  for (int i = 0; i < 4; ++i) {
    const Point2 e = v[(i + 1) & 3] - v[i];
    const double len = norm(e);
    n[i] = {-e.y / len, e.x / len};
    off[i] = dot(n[i], v[i]);
  }

  // The largest inscribed circle solves an LP in (x, y, r); some optimum has
  // three active sides, so trying all triples is exact.
  double best_r = -1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        const double m[3][3] = {{n[i].x, n[i].y, -1.0},
                                {n[j].x, n[j].y, -1.0},
                                {n[k].x, n[k].y, -1.0}};
        const double d = det3(m);
        if (std::fabs(d) < 1e-14) continue;
        const double rhs[3] = {off[i], off[j], off[k]};
        double sol[3];
        for (int c = 0; c < 3; ++c) {
          double mc[3][3];
          for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc)
              mc[r][cc] = (cc == c) ? rhs[r] : m[r][cc];
          sol[c] = det3(mc) / d;
        }
        const Point2 center{sol[0], sol[1]};
        const double r = sol[2];
        if (!(r > 0.0)) continue;
        bool ok = true;
        for (int s = 0; s < 4 && ok; ++s)
          ok = dot(n[s], center) - off[s] >= r - 1e-12 * q.h();
        if (ok && r > best_r) best_r = r;
      }
  if (best_r <= 0.0)
    throw DegenerateQuad("no inscribed circle found (degenerate quad)");
  return q.h() / (2.0 * best_r);
}

namespace {

FlagResult make_flag(double attained, double C) {
  return {attained <= C * (1.0 + 1e-12), attained};
}

}  // namespace

ConditionFlags condition_flags(const CanonicalQuad& cq, double C) {
  ConditionFlags f;
  const double r1 = cq.at() / cq.a();
  const double r2 = cq.bt() / cq.b();
  const double ratio_max = std::max(r1, r2);
  f.delta1 = make_flag(ratio_max, C);
  f.d1 = make_flag(ratio_max, 1.0);
  f.d2 = make_flag(1.0 / std::sin(cq.alpha()), C);
  const double m_len = std::hypot(cq.at() - cq.a(), cq.bt());
  const double s_len = std::min({cq.a(), cq.b(), cq.l_len(), m_len});
  f.delta2 = make_flag(cq.l_len() / s_len, C);
  f.d3 = make_flag(std::max(cq.a() / cq.b(), cq.b() / cq.a()), C);
  return f;
}

bool equivalence_check(const CanonicalQuad& cq) {
  const ConditionFlags f = condition_flags(cq, 1.0);
  const double a1 = f.delta1.attained;
  const double a2 = f.delta2.attained;
  const double c2 = f.d2.attained;
  // [delta1,d2] -> delta2 with constant C2*max(2*C1, 1): |l|*sin(alpha) is at
  // most min(a,b)*(at/a + bt/b - 1), and |l| <= C2*|V2V3| by the sine law.
  // [delta2] -> delta1 with constant 1 + C: at <= |l| and |b - bt| <= |l|.
  const bool fwd = a2 <= c2 * std::max(2.0 * a1, 1.0) * (1.0 + 1e-9);
  const bool rev = a1 <= (1.0 + a2) * (1.0 + 1e-9);
  return fwd && rev;
}

namespace {

// Canonicalization core: origin at vertex w, the traversal direction chosen by
// `reversed`.  Writing u, u' for the sides leaving w (x-axis side first) and
// c1, c2 for the coordinates of the opposite vertex in the normalized side
// basis, the family element is K(|u|, |u'| sin(beta), c1, c2 sin(beta)) and
// the map has columns [u/|u| , u'/(|u'| sin(beta))].  reversed swaps the two
// side roles, which composes a reflection into the map (det < 0).
CanonicalizeResult canonical_at(const ConvexQuad& q, int w, bool reversed) {
  const auto& v = q.vertices();
  const Point2 W = v[w & 3];
  const Point2 u = v[(w + (reversed ? 3 : 1)) & 3] - W;
  const Point2 up = v[(w + (reversed ? 1 : 3)) & 3] - W;
  const Point2 v3 = v[(w + 2) & 3] - W;

  const double lu = norm(u), lup = norm(up);
  const Point2 hu = (1.0 / lu) * u, hup = (1.0 / lup) * up;
  const double cr = cross(hu, hup);  // +-sin(beta)
  const double s = std::fabs(cr);
  if (!(s > 0.0)) throw ConstructionFailed("degenerate corner angle");

  const double c1 = cross(v3, hup) / cr;
  const double c2 = cross(hu, v3) / cr;
  if (!(c1 > 0.0 && c2 > 0.0))
    throw ConstructionFailed("opposite vertex left the corner cone");

  CanonicalQuad canon(lu, lup * s, c1, c2 * s);
  AffineMap2 map;
  map.B = {hu.x, hup.x / s, hu.y, hup.y / s};
  map.p = W;
  map.kappa = map.B.cond();
  return {canon, map};
}

int mod4(int i) { return i & 3; }

CanonicalizeResult canonicalize_rdp_like(const ConvexQuad& q,
                                         const RdpResult& rdp) {
  const int q0 = rdp.diagonal - 1;
  // T_A = (q0, q0+1, q0+2) owns quad sides q0, q0+1; T_B owns the other two.
  const int m = q.shortest_side();
  const int w = (m == q0 || m == mod4(q0 + 1)) ? mod4(q0 + 3) : mod4(q0 + 1);
  // Place the side opposite the shortest one on the x axis.
  const bool reversed = (m == mod4(w + 1));
  return canonical_at(q, w, reversed);
}

}  // namespace

CanonicalizeResult canonicalize(const ConvexQuad& q, CanonicalTarget target) {
  switch (target) {
    case CanonicalTarget::Rdp:
    case CanonicalTarget::Regular:
      return canonicalize_rdp_like(q, check_rdp(q));
    case CanonicalTarget::MacOnly: {
      const auto cands = rdp_candidates(q);
      // Longest diagonal keeps N <= 1 and sub-triangle angles within psi_max.
      const RdpResult& pick =
          q.d1_len() >= q.d2_len() ? cands[0] : cands[1];
      return canonicalize_rdp_like(q, pick);
    }
    case CanonicalTarget::Dac:
      break;
  }

  // Dac: a corner whose adjacent-sides parallelogram contains the quad always
  // exists; after the shear that containment is exactly d1.
  const auto& v = q.vertices();
  const auto angles = interior_angles(q);
  int best_w = -1;
  double best_sin = -1.0;
  for (int w = 0; w < 4; ++w) {
    const Point2 W = v[w];
    const Point2 e1 = v[mod4(w + 1)] - W;
    const Point2 e2 = v[mod4(w + 3)] - W;
    const double d = cross(e1, e2);
    const Point2 opp = v[mod4(w + 2)] - W;
    const double t1 = cross(opp, e2) / d;
    const double t2 = cross(e1, opp) / d;
    if (t1 <= 1.0 + 1e-12 && t2 <= 1.0 + 1e-12) {
      const double sb = std::sin(angles[static_cast<std::size_t>(w)]);
      if (sb > best_sin) {
        best_sin = sb;
        best_w = w;
      }
    }
  }
  if (best_w < 0)
    throw ConstructionFailed("no containing corner parallelogram found");

  CanonicalizeResult r = canonical_at(q, best_w, false);
  if (r.canonical.bt() / r.canonical.b() < 0.5)
    r = canonical_at(q, best_w, true);  // normalize-tall via the reflection
  return r;
}

CanonicalQuad normalize_tall(const CanonicalQuad& cq) {
  if (!std::isfinite(1.0 / std::sin(cq.alpha())))
    throw PreconditionFailed("degenerate alpha");
  if (cq.bt() / cq.b() >= 0.5) return cq;
  return CanonicalQuad(cq.b(), cq.a(), cq.bt(), cq.at());
}

ConditionReport classify(const ConvexQuad& q, double psi_m, double psi_M,
                         double flag_c) {
  ConditionReport rep;
  const auto ang = interior_angles(q);
  rep.psi_min = *std::min_element(ang.begin(), ang.end());
  rep.psi_max = *std::max_element(ang.begin(), ang.end());
  rep.mac = rep.psi_min >= psi_m;
  rep.MAC = rep.psi_max <= psi_M;
  rep.DAC = rep.mac && rep.MAC;
  rep.rdp = check_rdp(q);
  rep.h_over_rho = regularity_ratio(q);
  rep.flags =
      condition_flags(canonicalize(q, CanonicalTarget::Dac).canonical, flag_c);
  return rep;
}

AngleBounds angle_distortion_bounds(const AffineMap2& map, double ang) {
  const double k = map.kappa;
  return {2.0 * ang / (k * kPi), kPi * (1.0 - 2.0 / (k * kPi)) + 2.0 * ang / (k * kPi)};
}

}  // namespace quadint
