#include "quadint/kernels.hpp"

#include <atomic>
#include <cmath>

namespace quadint::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

namespace {

// |v|^p for integer p in [1, 32] by squaring; keeps the SIMD variants exact
// multiples of the scalar recurrence.
inline double ipow_abs(double v, int p) {
  double base = std::fabs(v);
  double r = 1.0;
  while (p > 0) {
    if (p & 1) r *= base;
    base *= base;
    p >>= 1;
  }
  return r;
}

}  // namespace

double weighted_abs_pow_sum_scalar(const double* v, const double* w,
                                   std::size_t n, double p) {
  double s = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(v[i]);
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * v[i] * v[i];
  } else if (p == std::floor(p) && p >= 1.0 && p <= 32.0) {
    const int ip = static_cast<int>(p);
    for (std::size_t i = 0; i < n; ++i) s += w[i] * ipow_abs(v[i], ip);
  } else {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::pow(std::fabs(v[i]), p);
  }
  return s;
}

void affine_eval_scalar(const double* x, const double* y, double c0, double cx,
                        double cy, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c0 + cx * x[i] + cy * y[i];
}

void bilinear_forward_scalar(const double* x, const double* y,
                             const double cx[4], const double cy[4],
                             double* out_x, double* out_y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xy = x[i] * y[i];
    out_x[i] = cx[0] + cx[1] * x[i] + cx[2] * y[i] + cx[3] * xy;
    out_y[i] = cy[0] + cy[1] * x[i] + cy[2] * y[i] + cy[3] * xy;
  }
}

}  // namespace detail

namespace {

std::atomic<bool> g_force_scalar{false};

bool cpu_supports_simd() {
#if defined(QUADINT_BUILD_AVX2)
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#elif defined(QUADINT_BUILD_NEON)
  return true;  // NEON is baseline on aarch64.
#else
  return false;
#endif
}

inline bool use_simd() {
  return cpu_supports_simd() && !g_force_scalar.load(std::memory_order_relaxed);
}

}  // namespace

void force_scalar(bool on) {
  g_force_scalar.store(on, std::memory_order_relaxed);
}

Isa active_isa() {
  if (!use_simd()) return Isa::Scalar;
#if defined(QUADINT_BUILD_AVX2)
  return Isa::Avx2;
#elif defined(QUADINT_BUILD_NEON)
  return Isa::Neon;
#else
  return Isa::Scalar;
#endif
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
    default:
      return "scalar";
  }
}

double dot(const double* a, const double* b, std::size_t n) {
#if defined(QUADINT_BUILD_AVX2)
  if (use_simd()) return detail::dot_avx2(a, b, n);
#elif defined(QUADINT_BUILD_NEON)
  if (use_simd()) return detail::dot_neon(a, b, n);
#endif
  return detail::dot_scalar(a, b, n);
}

double weighted_abs_pow_sum(const double* v, const double* w, std::size_t n,
                            double p) {
#if defined(QUADINT_BUILD_AVX2)
  if (use_simd()) return detail::weighted_abs_pow_sum_avx2(v, w, n, p);
#elif defined(QUADINT_BUILD_NEON)
  if (use_simd()) return detail::weighted_abs_pow_sum_neon(v, w, n, p);
#endif
  return detail::weighted_abs_pow_sum_scalar(v, w, n, p);
}

void affine_eval(const double* x, const double* y, double c0, double cx,
                 double cy, double* out, std::size_t n) {
#if defined(QUADINT_BUILD_AVX2)
  if (use_simd()) return detail::affine_eval_avx2(x, y, c0, cx, cy, out, n);
#elif defined(QUADINT_BUILD_NEON)
  if (use_simd()) return detail::affine_eval_neon(x, y, c0, cx, cy, out, n);
#endif
  detail::affine_eval_scalar(x, y, c0, cx, cy, out, n);
}

void bilinear_forward(const double* x, const double* y, const double cx[4],
                      const double cy[4], double* out_x, double* out_y,
                      std::size_t n) {
#if defined(QUADINT_BUILD_AVX2)
  if (use_simd())
    return detail::bilinear_forward_avx2(x, y, cx, cy, out_x, out_y, n);
#elif defined(QUADINT_BUILD_NEON)
  if (use_simd())
    return detail::bilinear_forward_neon(x, y, cx, cy, out_x, out_y, n);
#endif
  detail::bilinear_forward_scalar(x, y, cx, cy, out_x, out_y, n);
}

}  // namespace quadint::kernels
