// AVX2 variants of the batch kernel primitives. Compiled with -mavx2 in this
// translation unit only; callers reach them through the runtime dispatch in
// simd.cpp.

#include <cmath>
#include <cstddef>

#include "cei/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace cei::simd::detail {

namespace {

// exp on 4 doubles, Cephes-style: 2^n * R(r) after range reduction
// x = n*ln2 + r. Accurate to a couple of ulps on [-708, 708]; inputs below
// the underflow edge return exactly 0.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d underflow = _mm256_set1_pd(-708.39641853226408);
  const __m256d overflow = _mm256_set1_pd(708.39641853226408);

  const __m256d too_small = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, underflow), overflow);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, ln2_hi));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, ln2_lo));
  const __m256d r2 = _mm256_mul_pd(r, r);

  // exp(r) = 1 + 2r*P(r^2) / (Q(r^2) - r*P(r^2))
  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_add_pd(_mm256_mul_pd(p, r2),
                    _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_add_pd(_mm256_mul_pd(p, r2),
                    _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_add_pd(_mm256_mul_pd(q, r2),
                    _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_add_pd(_mm256_mul_pd(q, r2),
                    _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_add_pd(_mm256_mul_pd(q, r2),
                    _mm256_set1_pd(2.00000000000000000005e0));

  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  // scale by 2^n through the exponent bits
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i pow2 = _mm256_slli_epi64(
      _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));

  return _mm256_andnot_pd(too_small, e);
}

}  // namespace

void squared_distances_avx2(const Mat& pts, const Vec& x, double* out) {
  const Eigen::Index n = pts.rows();
  const int dim = static_cast<int>(pts.cols());
  Eigen::Index i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int d = 0; d < dim; ++d) {
      const __m256d col = _mm256_loadu_pd(pts.data() + d * n + i);
      const __m256d diff = _mm256_sub_pd(col, _mm256_set1_pd(x[d]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = pts(i, d) - x[d];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

void se_transform_avx2(double inv_two_l2, double* v, std::size_t n) {
  const __m256d neg_scale = _mm256_set1_pd(-inv_two_l2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r2 = _mm256_loadu_pd(v + i);
    _mm256_storeu_pd(v + i, exp4(_mm256_mul_pd(r2, neg_scale)));
  }
  for (; i < n; ++i) v[i] = std::exp(-v[i] * inv_two_l2);
}

void matern_transform_avx2(double nu, double scale_over_l, double* v,
                           std::size_t n) {
  const __m256d scale = _mm256_set1_pd(scale_over_l);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s =
        _mm256_mul_pd(scale, _mm256_sqrt_pd(_mm256_loadu_pd(v + i)));
    const __m256d es = exp4(_mm256_sub_pd(_mm256_setzero_pd(), s));
    __m256d poly;
    if (nu == 0.5) {
      poly = one;
    } else if (nu == 1.5) {
      poly = _mm256_add_pd(one, s);
    } else {  // nu == 2.5
      poly = _mm256_add_pd(_mm256_add_pd(one, s),
                           _mm256_div_pd(_mm256_mul_pd(s, s), three));
    }
    _mm256_storeu_pd(v + i, _mm256_mul_pd(poly, es));
  }
  for (; i < n; ++i) {
    const double s = scale_over_l * std::sqrt(v[i]);
    if (nu == 0.5) {
      v[i] = std::exp(-s);
    } else if (nu == 1.5) {
      v[i] = (1.0 + s) * std::exp(-s);
    } else {
      v[i] = (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
}

}  // namespace cei::simd::detail

#else  // non-x86 fallbacks keep the dispatch table linkable

namespace cei::simd::detail {

void squared_distances_avx2(const Mat& pts, const Vec& x, double* out) {
  const Eigen::Index n = pts.rows();
  const int dim = static_cast<int>(pts.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = pts(i, d) - x[d];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

void se_transform_avx2(double inv_two_l2, double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(-v[i] * inv_two_l2);
}

void matern_transform_avx2(double nu, double scale_over_l, double* v,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = scale_over_l * std::sqrt(v[i]);
    if (nu == 0.5) {
      v[i] = std::exp(-s);
    } else if (nu == 1.5) {
      v[i] = (1.0 + s) * std::exp(-s);
    } else {
      v[i] = (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
}

}  // namespace cei::simd::detail

#endif
