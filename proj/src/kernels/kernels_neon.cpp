#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "quadint/kernels.hpp"

namespace quadint::kernels::detail {

namespace {

inline float64x2_t ipow_abs2(float64x2_t v, int p) {
  float64x2_t base = vabsq_f64(v);
  float64x2_t r = vdupq_n_f64(1.0);
  while (p > 0) {
    if (p & 1) r = vmulq_f64(r, base);
    base = vmulq_f64(base, base);
    p >>= 1;
  }
  return r;
}

}  // namespace

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_abs_pow_sum_neon(const double* v, const double* w,
                                 std::size_t n, double p) {
  std::size_t i = 0;
  double s = 0.0;
  if (p == 1.0) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2)
      acc = vfmaq_f64(acc, vld1q_f64(w + i), vabsq_f64(vld1q_f64(v + i)));
    s = vaddvq_f64(acc);
    for (; i < n; ++i) s += w[i] * std::fabs(v[i]);
  } else if (p == 2.0) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) {
      float64x2_t vv = vld1q_f64(v + i);
      acc = vfmaq_f64(acc, vmulq_f64(vv, vv), vld1q_f64(w + i));
    }
    s = vaddvq_f64(acc);
    for (; i < n; ++i) s += w[i] * v[i] * v[i];
  } else if (p == std::floor(p) && p >= 1.0 && p <= 32.0) {
    const int ip = static_cast<int>(p);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2)
      acc = vfmaq_f64(acc, vld1q_f64(w + i), ipow_abs2(vld1q_f64(v + i), ip));
    s = vaddvq_f64(acc);
    for (; i < n; ++i) {
      double base = std::fabs(v[i]), r = 1.0;
      for (int q = ip; q > 0; q >>= 1, base *= base)
        if (q & 1) r *= base;
      s += w[i] * r;
    }
  } else {
    for (; i < n; ++i) s += w[i] * std::pow(std::fabs(v[i]), p);
  }
  return s;
}

void affine_eval_neon(const double* x, const double* y, double c0, double cx,
                      double cy, double* out, std::size_t n) {
  const float64x2_t vc0 = vdupq_n_f64(c0);
  const float64x2_t vcx = vdupq_n_f64(cx);
  const float64x2_t vcy = vdupq_n_f64(cy);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vfmaq_f64(vc0, vcx, vld1q_f64(x + i));
    r = vfmaq_f64(r, vcy, vld1q_f64(y + i));
    vst1q_f64(out + i, r);
  }
  for (; i < n; ++i) out[i] = c0 + cx * x[i] + cy * y[i];
}

void bilinear_forward_neon(const double* x, const double* y, const double cx[4],
                           const double cy[4], double* out_x, double* out_y,
                           std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vx = vld1q_f64(x + i);
    float64x2_t vy = vld1q_f64(y + i);
    float64x2_t vxy = vmulq_f64(vx, vy);
    float64x2_t rx = vfmaq_f64(vdupq_n_f64(cx[0]), vdupq_n_f64(cx[1]), vx);
    rx = vfmaq_f64(rx, vdupq_n_f64(cx[2]), vy);
    rx = vfmaq_f64(rx, vdupq_n_f64(cx[3]), vxy);
    float64x2_t ry = vfmaq_f64(vdupq_n_f64(cy[0]), vdupq_n_f64(cy[1]), vx);
    ry = vfmaq_f64(ry, vdupq_n_f64(cy[2]), vy);
    ry = vfmaq_f64(ry, vdupq_n_f64(cy[3]), vxy);
    vst1q_f64(out_x + i, rx);
    vst1q_f64(out_y + i, ry);
  }
  for (; i < n; ++i) {
    const double xy = x[i] * y[i];
    out_x[i] = cx[0] + cx[1] * x[i] + cx[2] * y[i] + cx[3] * xy;
    out_y[i] = cy[0] + cy[1] * x[i] + cy[2] * y[i] + cy[3] * xy;
  }
}

}  // namespace quadint::kernels::detail
