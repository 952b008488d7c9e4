#pragma once

#include <cstddef>
#include <string>

#include "cei/common.hpp"

namespace cei::simd {

enum class Backend { Scalar, Avx2 };

// Backend picked once at startup: AVX2 when the CPU supports it, otherwise
// scalar. CEI_BENCH_SIMD=scalar|avx2|auto overrides (avx2 on an unsupported
// CPU falls back to scalar).
Backend active_backend();
const char* backend_name(Backend b);
bool cpu_has_avx2();

// out[i] = sum_d (pts(i, d) - x[d])^2 for the n rows of pts (n x dim,
// column-major). Per-element operation order is identical in both backends,
// so outputs match bitwise.
void squared_distances(const Mat& pts, const Vec& x, double* out);
void squared_distances_backend(Backend b, const Mat& pts, const Vec& x,
                               double* out);

// In-place transforms from squared distance r^2 to kernel value. The AVX2
// variants use a vectorized exp and agree with the scalar ones to within a
// few ulps (covered by the equivalence tests).
void se_transform(double inv_two_l2, double* r2_to_k, std::size_t n);
void matern_transform(double nu, double scale_over_l, double* r2_to_k,
                      std::size_t n);
void se_transform_backend(Backend b, double inv_two_l2, double* r2_to_k,
                          std::size_t n);
void matern_transform_backend(Backend b, double nu, double scale_over_l,
                              double* r2_to_k, std::size_t n);

// Implementations compiled in the AVX2 translation unit.
namespace detail {
void squared_distances_avx2(const Mat& pts, const Vec& x, double* out);
void se_transform_avx2(double inv_two_l2, double* v, std::size_t n);
void matern_transform_avx2(double nu, double scale_over_l, double* v,
                           std::size_t n);
}  // namespace detail

}  // namespace cei::simd
