#include "cei/simd.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace cei::simd {

namespace {

void squared_distances_scalar(const Mat& pts, const Vec& x, double* out) {
  const auto n = pts.rows();
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

void se_transform_scalar(double inv_two_l2, double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(-v[i] * inv_two_l2);
}

void matern_transform_scalar(double nu, double scale_over_l, double* v,
                             std::size_t n) {
  if (nu == 0.5) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = scale_over_l * std::sqrt(v[i]);
      v[i] = std::exp(-s);
    }
  } else if (nu == 1.5) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = scale_over_l * std::sqrt(v[i]);
      v[i] = (1.0 + s) * std::exp(-s);
    }
  } else {  // nu == 2.5
    for (std::size_t i = 0; i < n; ++i) {
      const double s = scale_over_l * std::sqrt(v[i]);
      v[i] = (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
}

Backend detect_backend() {
  const char* env = std::getenv("CEI_BENCH_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0)
      return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend backend = detect_backend();
  return backend;
}

const char* backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void squared_distances_backend(Backend b, const Mat& pts, const Vec& x,
                               double* out) {
  if (b == Backend::Avx2) {
    detail::squared_distances_avx2(pts, x, out);
  } else {
    squared_distances_scalar(pts, x, out);
  }
}

void se_transform_backend(Backend b, double inv_two_l2, double* v,
                          std::size_t n) {
  if (b == Backend::Avx2) {
    detail::se_transform_avx2(inv_two_l2, v, n);
  } else {
    se_transform_scalar(inv_two_l2, v, n);
  }
}

void matern_transform_backend(Backend b, double nu, double scale_over_l,
                              double* v, std::size_t n) {
  if (b == Backend::Avx2) {
    detail::matern_transform_avx2(nu, scale_over_l, v, n);
  } else {
    matern_transform_scalar(nu, scale_over_l, v, n);
  }
}

void squared_distances(const Mat& pts, const Vec& x, double* out) {
  squared_distances_backend(active_backend(), pts, x, out);
}

void se_transform(double inv_two_l2, double* v, std::size_t n) {
  se_transform_backend(active_backend(), inv_two_l2, v, n);
}

void matern_transform(double nu, double scale_over_l, double* v,
                      std::size_t n) {
  matern_transform_backend(active_backend(), nu, scale_over_l, v, n);
}

}  // namespace cei::simd
