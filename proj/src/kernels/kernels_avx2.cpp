#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "quadint/kernels.hpp"

// Translation unit compiled with -mavx2 -mfma; only reached after the runtime
// cpuid check in kernels.cpp.

namespace quadint::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

const __m256d kAbsMask =
    _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

inline __m256d ipow_abs4(__m256d v, int p) {
  __m256d base = _mm256_and_pd(v, kAbsMask);
  __m256d r = _mm256_set1_pd(1.0);
  while (p > 0) {
    if (p & 1) r = _mm256_mul_pd(r, base);
    base = _mm256_mul_pd(base, base);
    p >>= 1;
  }
  return r;
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_abs_pow_sum_avx2(const double* v, const double* w,
                                 std::size_t n, double p) {
  std::size_t i = 0;
  double s = 0.0;
  if (p == 1.0) {
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
      __m256d av = _mm256_and_pd(_mm256_loadu_pd(v + i), kAbsMask);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), av, acc);
    }
    s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::fabs(v[i]);
  } else if (p == 2.0) {
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
      __m256d vv = _mm256_loadu_pd(v + i);
      acc = _mm256_fmadd_pd(_mm256_mul_pd(vv, vv), _mm256_loadu_pd(w + i), acc);
    }
    s = hsum(acc);
    for (; i < n; ++i) s += w[i] * v[i] * v[i];
  } else if (p == std::floor(p) && p >= 1.0 && p <= 32.0) {
    const int ip = static_cast<int>(p);
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
      __m256d pw = ipow_abs4(_mm256_loadu_pd(v + i), ip);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), pw, acc);
    }
    s = hsum(acc);
    for (; i < n; ++i) {
      double base = std::fabs(v[i]), r = 1.0;
      for (int q = ip; q > 0; q >>= 1, base *= base)
        if (q & 1) r *= base;
      s += w[i] * r;
    }
  } else {
    // No vector pow without SVML; scalar loop keeps results identical.
    for (; i < n; ++i) s += w[i] * std::pow(std::fabs(v[i]), p);
  }
  return s;
}

void affine_eval_avx2(const double* x, const double* y, double c0, double cx,
                      double cy, double* out, std::size_t n) {
  const __m256d vc0 = _mm256_set1_pd(c0);
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(vcx, _mm256_loadu_pd(x + i), vc0);
    r = _mm256_fmadd_pd(vcy, _mm256_loadu_pd(y + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = c0 + cx * x[i] + cy * y[i];
}

void bilinear_forward_avx2(const double* x, const double* y, const double cx[4],
                           const double cy[4], double* out_x, double* out_y,
                           std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vxy = _mm256_mul_pd(vx, vy);
    __m256d rx = _mm256_fmadd_pd(_mm256_set1_pd(cx[1]), vx,
                                 _mm256_set1_pd(cx[0]));
    rx = _mm256_fmadd_pd(_mm256_set1_pd(cx[2]), vy, rx);
    rx = _mm256_fmadd_pd(_mm256_set1_pd(cx[3]), vxy, rx);
    __m256d ry = _mm256_fmadd_pd(_mm256_set1_pd(cy[1]), vx,
                                 _mm256_set1_pd(cy[0]));
    ry = _mm256_fmadd_pd(_mm256_set1_pd(cy[2]), vy, ry);
    ry = _mm256_fmadd_pd(_mm256_set1_pd(cy[3]), vxy, ry);
    _mm256_storeu_pd(out_x + i, rx);
    _mm256_storeu_pd(out_y + i, ry);
  }
  for (; i < n; ++i) {
    const double xy = x[i] * y[i];
    out_x[i] = cx[0] + cx[1] * x[i] + cx[2] * y[i] + cx[3] * xy;
    out_y[i] = cy[0] + cy[1] * x[i] + cy[2] * y[i] + cy[3] * xy;
  }
}

}  // namespace quadint::kernels::detail
