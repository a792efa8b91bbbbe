#pragma once

#include <cstddef>

// Hot inner loops of the quadrature/norm pipeline.  Each kernel has a scalar
// reference implementation plus runtime-dispatched AVX2 (x86) and NEON
// (aarch64) variants; the variants must agree with the scalar path up to
// summation-order roundoff.

namespace quadint::kernels {

enum class Isa { Scalar, Avx2, Neon };

/// ISA the dispatcher currently selects.
Isa active_isa();
const char* isa_name(Isa isa);

/// Forces the scalar path (true) or re-enables dispatch (false).
void force_scalar(bool on);

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

/// sum_i w[i] * |v[i]|^p.  Fast paths for p == 1, p == 2 and small integer p;
/// non-integer p falls back to a scalar std::pow loop in every variant.
double weighted_abs_pow_sum(const double* v, const double* w, std::size_t n,
                            double p);

/// out[i] = c0 + cx * x[i] + cy * y[i]
void affine_eval(const double* x, const double* y, double c0, double cx,
                 double cy, double* out, std::size_t n);

/// Batched bilinear map: out_x[i] = cx[0] + cx[1]*x + cx[2]*y + cx[3]*x*y,
/// likewise out_y with cy.
void bilinear_forward(const double* x, const double* y, const double cx[4],
                      const double cy[4], double* out_x, double* out_y,
                      std::size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double weighted_abs_pow_sum_scalar(const double* v, const double* w,
                                   std::size_t n, double p);
void affine_eval_scalar(const double* x, const double* y, double c0, double cx,
                        double cy, double* out, std::size_t n);
void bilinear_forward_scalar(const double* x, const double* y,
                             const double cx[4], const double cy[4],
                             double* out_x, double* out_y, std::size_t n);

#ifdef QUADINT_BUILD_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n);
double weighted_abs_pow_sum_avx2(const double* v, const double* w,
                                 std::size_t n, double p);
void affine_eval_avx2(const double* x, const double* y, double c0, double cx,
                      double cy, double* out, std::size_t n);
void bilinear_forward_avx2(const double* x, const double* y, const double cx[4],
                           const double cy[4], double* out_x, double* out_y,
                           std::size_t n);
#endif

#ifdef QUADINT_BUILD_NEON
double dot_neon(const double* a, const double* b, std::size_t n);
double weighted_abs_pow_sum_neon(const double* v, const double* w,
                                 std::size_t n, double p);
void affine_eval_neon(const double* x, const double* y, double c0, double cx,
                      double cy, double* out, std::size_t n);
void bilinear_forward_neon(const double* x, const double* y, const double cx[4],
                           const double cy[4], double* out_x, double* out_y,
                           std::size_t n);
#endif
}  // namespace detail

}  // namespace quadint::kernels
