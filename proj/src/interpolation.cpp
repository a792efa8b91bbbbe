#include "quadint/interpolation.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>

#include "quadint/kernels.hpp"

namespace quadint {

namespace {

// Inside this distance of a node the basis is evaluated by its nodal limit
// (exact delta / differentiation-matrix formulas) instead of the barycentric
// quotient; nodes are 1/k >= 0.1 apart so the window is unambiguous.
constexpr double kNodeSnap = 1e-13;

int nearest_node(const std::vector<double>& nodes, double t) {
  int r = 0;
  double best = std::fabs(t - nodes[0]);
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    const double d = std::fabs(t - nodes[j]);
    if (d < best) {
      best = d;
      r = static_cast<int>(j);
    }
  }
  return r;
}

}  // namespace

Lagrange1D::Lagrange1D(int k) : k_(k) {
  if (k < 1 || k > kMaxDegree) throw InvalidIndex("degree out of range");
  nodes_.resize(static_cast<std::size_t>(k) + 1);
  w_.resize(nodes_.size());
  for (int j = 0; j <= k; ++j)
    nodes_[static_cast<std::size_t>(j)] = static_cast<double>(j) / k;
  for (int j = 0; j <= k; ++j) {
    double prod = 1.0;
    for (int m = 0; m <= k; ++m)
      if (m != j)
        prod *= nodes_[static_cast<std::size_t>(j)] -
                nodes_[static_cast<std::size_t>(m)];
    w_[static_cast<std::size_t>(j)] = 1.0 / prod;
  }
}

double Lagrange1D::node(int j) const {
  if (j < 0 || j > k_) throw InvalidIndex("node index out of range");
  return nodes_[static_cast<std::size_t>(j)];
}

void Lagrange1D::values(double t, double* out) const {
  const std::size_t n = nodes_.size();
  const int r = nearest_node(nodes_, t);
  if (std::fabs(t - nodes_[static_cast<std::size_t>(r)]) < kNodeSnap) {
    for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
    out[static_cast<std::size_t>(r)] = 1.0;
    return;
  }
  // Second barycentric form; the normalization makes the values sum to 1
  // exactly, so partition of unity is exact by construction.
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = w_[j] / (t - nodes_[j]);
    s += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= s;
}

void Lagrange1D::derivatives(double t, double* out) const {
  const std::size_t n = nodes_.size();
  const auto r = static_cast<std::size_t>(nearest_node(nodes_, t));
  if (std::fabs(t - nodes_[r]) < kNodeSnap) {
    // Differentiation-matrix row: l_j'(x_r) = (w_j/w_r)/(x_r - x_j), with the
    // diagonal fixed by the zero row sum.
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == r) continue;
      out[j] = (w_[j] / w_[r]) / (nodes_[r] - nodes_[j]);
      diag -= out[j];
    }
    out[r] = diag;
    return;
  }
  // Quotient rule on the second barycentric form; the derivatives sum to 0
  // exactly for the same reason the values sum to 1.
  double s = 0.0, sd = 0.0;
  double num[kMaxDegree + 1], dnum[kMaxDegree + 1];
  for (std::size_t j = 0; j < n; ++j) {
    const double d = t - nodes_[j];
    num[j] = w_[j] / d;
    dnum[j] = -w_[j] / (d * d);
    s += num[j];
    sd += dnum[j];
  }
  for (std::size_t j = 0; j < n; ++j)
    out[j] = (dnum[j] * s - num[j] * sd) / (s * s);
}

double Lagrange1D::value(int j, double t) const {
  if (j < 0 || j > k_) throw InvalidIndex("node index out of range");
  double buf[kMaxDegree + 1];
  values(t, buf);
  return buf[j];
}

double Lagrange1D::derivative(int j, double t) const {
  if (j < 0 || j > k_) throw InvalidIndex("node index out of range");
  double buf[kMaxDegree + 1];
  derivatives(t, buf);
  return buf[j];
}

QkBasis::QkBasis(int k) : k_(k), line_(k) {}

int QkBasis::flat(int i, int j) const {
  if (i < 0 || i > k_ || j < 0 || j > k_)
    throw InvalidIndex("basis index out of range");
  return i * (k_ + 1) + j;
}

double QkBasis::value(int i, int j, double xh, double yh) const {
  flat(i, j);
  return line_.value(j, xh) * line_.value(i, yh);
}

Point2 QkBasis::gradient(int i, int j, double xh, double yh) const {
  flat(i, j);
  return {line_.derivative(j, xh) * line_.value(i, yh),
          line_.value(j, xh) * line_.derivative(i, yh)};
}

void QkBasis::values(double xh, double yh, double* out) const {
  double bx[kMaxDegree + 1], by[kMaxDegree + 1];
  line_.values(xh, bx);
  line_.values(yh, by);
  for (int i = 0; i <= k_; ++i)
    for (int j = 0; j <= k_; ++j) out[i * (k_ + 1) + j] = bx[j] * by[i];
}

void QkBasis::gradients(double xh, double yh, Point2* out) const {
  double bx[kMaxDegree + 1], by[kMaxDegree + 1];
  double dx[kMaxDegree + 1], dy[kMaxDegree + 1];
  line_.values(xh, bx);
  line_.values(yh, by);
  line_.derivatives(xh, dx);
  line_.derivatives(yh, dy);
  for (int i = 0; i <= k_; ++i)
    for (int j = 0; j <= k_; ++j)
      out[i * (k_ + 1) + j] = {dx[j] * by[i], bx[j] * dy[i]};
}

Point2 NodeGrid::at(int i, int j) const {
  if (i < 0 || i > k || j < 0 || j > k)
    throw InvalidIndex("node index out of range");
  return nodes[static_cast<std::size_t>(i * (k + 1) + j)];
}

bool NodeGrid::interior(int i, int j) const {
  if (i < 0 || i > k || j < 0 || j > k)
    throw InvalidIndex("node index out of range");
  return i >= 1 && i <= k - 1 && j >= 1 && j <= k - 1;
}

NodeGrid node_grid(const BilinearMap& bm, int k) {
  if (k < 1) throw InvalidIndex("degree must be positive");
  NodeGrid g;
  g.k = k;
  g.nodes.reserve(static_cast<std::size_t>((k + 1) * (k + 1)));
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j)
      g.nodes.push_back(bm.forward({static_cast<double>(j) / k,
                                    static_cast<double>(i) / k}));
  return g;
}

double AuxTriangle::area() const {
  return 0.5 * std::fabs(cross(v[1] - v[0], v[2] - v[0]));
}

AuxTriangle aux_triangle(const BilinearMap& bm, int k, int i, int j) {
  if (k < 1) throw InvalidIndex("degree must be positive");
  if (i < 1 || i > k || j < 1 || j > k)
    throw InvalidIndex("triangle only defined for i != 0 != j");
  const Point2 t0 = bm.forward({0.0, 0.0});
  const Point2 ex = bm.forward({1.0, 0.0}) - t0;
  const Point2 ey = bm.forward({0.0, 1.0}) - t0;
  const auto mt = [&](int ii, int jj) {
    return t0 + (static_cast<double>(jj) / k) * ex +
           (static_cast<double>(ii) / k) * ey;
  };
  AuxTriangle t;
  if (i == k) {
    // Homothety of the triangle V3 V4 V2 centered at V4 with ratio j/k; the
    // probe edge is the scaled copy of the short side l.
    const Point2 node = bm.forward({static_cast<double>(j) / k, 1.0});
    t.kind = AuxKind::TopEdge;
    t.v[0] = node;
    t.v[1] = mt(k, 0);
    t.v[2] = mt(k - j, j);
    t.probe[0] = t.v[1];
    t.probe[1] = node;
    t.ratio = static_cast<double>(j) / k;
  } else if (j == k) {
    // Homothety of V3 V2 V4 centered at V2 with ratio i/k; the l-copy runs
    // from the hypotenuse node to M_ik, which is also the angle vertex.
    const Point2 node = bm.forward({1.0, static_cast<double>(i) / k});
    t.kind = AuxKind::RightEdge;
    t.v[0] = node;
    t.v[1] = mt(0, k);
    t.v[2] = mt(i, k - i);
    t.probe[0] = t.v[2];
    t.probe[1] = node;
    t.ratio = static_cast<double>(i) / k;
  } else {
    const Point2 node =
        bm.forward({static_cast<double>(j) / k, static_cast<double>(i) / k});
    const Point2 mi0 = mt(i, 0);
    const Point2 m0j = mt(0, j);
    t.kind = AuxKind::Interior;
    t.v[0] = node;
    t.v[1] = m0j;
    t.v[2] = mi0;
    t.probe[0] = mi0;
    t.probe[1] = node;
    t.leg_a = norm(node - mi0);
    t.leg_b = norm(node - m0j);
    t.alpha = angle_between(node - mi0, m0j - mi0);
  }
  return t;
}

QkInterpolant::QkInterpolant(const BilinearMap& bm, int k,
                             std::vector<double> nodal)
    : bm_(bm), basis_(k), grid_(node_grid(bm, k)), vals_(std::move(nodal)) {
  if (vals_.size() != static_cast<std::size_t>(basis_.size()))
    throw InvalidIndex("nodal value count does not match the grid");
}

double QkInterpolant::value_ref(double xh, double yh) const {
  double phi[(kMaxDegree + 1) * (kMaxDegree + 1)];
  basis_.values(xh, yh, phi);
  return kernels::dot(phi, vals_.data(), vals_.size());
}

Point2 QkInterpolant::gradient_ref(double xh, double yh) const {
  Point2 gphi[(kMaxDegree + 1) * (kMaxDegree + 1)];
  basis_.gradients(xh, yh, gphi);
  Point2 g{0.0, 0.0};
  for (std::size_t n = 0; n < vals_.size(); ++n) g = g + vals_[n] * gphi[n];
  return bm_.pullback_gradient({xh, yh}, g);
}

double QkInterpolant::value(Point2 x) const {
  const Point2 ref = bm_.inverse(x);
  return value_ref(ref.x, ref.y);
}

Point2 QkInterpolant::gradient(Point2 x) const {
  const Point2 ref = bm_.inverse(x);
  return gradient_ref(ref.x, ref.y);
}

QkInterpolant qk_interpolate(const BilinearMap& bm, int k, const Field& f) {
  const NodeGrid grid = node_grid(bm, k);
  std::vector<double> vals;
  vals.reserve(grid.nodes.size());
  for (const Point2& m : grid.nodes) vals.push_back(f.eval(m));
  return {bm, k, std::move(vals)};
}

QkInterpolant qk_interpolate(const CanonicalQuad& cq, int k, const Field& f) {
  return qk_interpolate(BilinearMap(cq), k, f);
}

Point2 physical_basis_grad_ref(const BilinearMap& bm, int k, int i, int j,
                               double xh, double yh) {
  const QkBasis basis(k);
  return bm.pullback_gradient({xh, yh}, basis.gradient(i, j, xh, yh));
}

Point2 physical_basis_grad(const BilinearMap& bm, int k, int i, int j,
                           Point2 point) {
  const Point2 ref = bm.inverse(point);
  return physical_basis_grad_ref(bm, k, i, j, ref.x, ref.y);
}

namespace {

// Gaussian elimination with full pivoting; A is square and dense.
std::vector<double> solve_full_pivot(std::vector<std::vector<double>> a,
                                     std::vector<double> rhs) {
  const std::size_t n = a.size();
  std::vector<std::size_t> colp(n);
  std::iota(colp.begin(), colp.end(), static_cast<std::size_t>(0));
  double scale = 1.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pr = step, pc = step;
    double best = 0.0;
    for (std::size_t r = step; r < n; ++r)
      for (std::size_t c = step; c < n; ++c)
        if (std::fabs(a[r][c]) > best) {
          best = std::fabs(a[r][c]);
          pr = r;
          pc = c;
        }
    if (best <= 1e-13 * scale)
      throw DegenerateTriangle("nodal system is singular");
    std::swap(a[step], a[pr]);
    std::swap(rhs[step], rhs[pr]);
    if (pc != step) {
      for (std::size_t r = 0; r < n; ++r) std::swap(a[r][step], a[r][pc]);
      std::swap(colp[step], colp[pc]);
    }
    for (std::size_t r = step + 1; r < n; ++r) {
      const double f = a[r][step] / a[step][step];
      if (f == 0.0) continue;
      a[r][step] = 0.0;
      for (std::size_t c = step + 1; c < n; ++c) a[r][c] -= f * a[step][c];
      rhs[r] -= f * rhs[step];
    }
  }
  std::vector<double> y(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r][c] * y[c];
    y[r] = acc / a[r][r];
  }
  std::vector<double> x(n);
  for (std::size_t idx = 0; idx < n; ++idx) x[colp[idx]] = y[idx];
  return x;
}

}  // namespace

TriangleInterpolant::TriangleInterpolant(double a, double b, int k, Poly2 poly,
                                         std::vector<Point2> nodes,
                                         std::vector<double> nodal)
    : a_(a),
      b_(b),
      k_(k),
      poly_(std::move(poly)),
      dx_(poly_.derivative(1, 0)),
      dy_(poly_.derivative(0, 1)),
      nodes_(std::move(nodes)),
      nodal_(std::move(nodal)) {}

Point2 TriangleInterpolant::gradient(Point2 x) const {
  return {dx_.eval(x), dy_.eval(x)};
}

TriangleInterpolant triangle_pk_interpolate(double a, double b, int k,
                                            const Field& f) {
  if (!(std::isfinite(a) && std::isfinite(b)) || a <= 0.0 || b <= 0.0)
    throw DegenerateTriangle("triangle legs must be positive");
  if (k < 1 || k > kMaxDegree) throw InvalidIndex("degree out of range");

  std::vector<std::pair<int, int>> expo;  // (m, n): (x/a)^m (y/b)^n
  for (int m = 0; m <= k; ++m)
    for (int n = 0; n + m <= k; ++n) expo.emplace_back(m, n);
  const std::size_t nn = expo.size();

  std::vector<Point2> nodes;
  std::vector<double> nodal;
  std::vector<std::vector<double>> mat;
  nodes.reserve(nn);
  nodal.reserve(nn);
  mat.reserve(nn);
  for (int i = 0; i <= k; ++i)
    for (int j = 0; i + j <= k; ++j) {
      const double u = static_cast<double>(j) / k;
      const double v = static_cast<double>(i) / k;
      nodes.push_back({a * u, b * v});
      nodal.push_back(f.eval(nodes.back()));
      std::vector<double> row;
      row.reserve(nn);
      for (const auto& [m, n] : expo)
        row.push_back(std::pow(u, m) * std::pow(v, n));
      mat.push_back(std::move(row));
    }

  const std::vector<double> coeff = solve_full_pivot(std::move(mat), nodal);

  std::vector<std::vector<double>> table(
      static_cast<std::size_t>(k) + 1,
      std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0));
  for (std::size_t c = 0; c < nn; ++c) {
    const auto [m, n] = expo[c];
    table[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] =
        coeff[c] / (std::pow(a, m) * std::pow(b, n));
  }
  return {a, b, k, Poly2(std::move(table)), std::move(nodes),
          std::move(nodal)};
}

}  // namespace quadint
