#pragma once

#include <nlohmann/json.hpp>

#include "cei/common.hpp"

namespace cei {

enum class KernelFamily { SquaredExponential, Matern };

// Stationary unit-variance covariance. Matern is restricted to the
// half-integer orders with closed polynomial-exponential forms:
//   nu = 0.5:  exp(-r/l)
//   nu = 1.5:  (1 + s) exp(-s),           s = sqrt(3) r / l
//   nu = 2.5:  (1 + s + s^2/3) exp(-s),   s = sqrt(5) r / l
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double nu = 2.5;  // used only for Matern
  double length_scale = 1.0;

  static KernelSpec se(double length_scale);
  static KernelSpec matern(double nu, double length_scale);

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

// k(a, b); checks dimensions and finiteness, returns a value in (0, 1]
// with eval(spec, x, x) = 1 exactly.
double kernel_eval(const KernelSpec& spec, const Vec& a, const Vec& b);

// Transform from squared distance to kernel value (scalar path).
double kernel_of_sqdist(const KernelSpec& spec, double r2);

// out[i] = k(pts.row(i), x); hot path, backed by the SIMD dispatch.
void kernel_eval_batch(const KernelSpec& spec, const Mat& pts, const Vec& x,
                       double* out);

// Symmetric PSD Gram matrix with unit diagonal.
Mat kernel_gram(const KernelSpec& spec, const Mat& X);

// Cross-covariance: (queries.rows() x X.rows()), entry (i, j) = k(q_i, x_j).
Mat kernel_cross(const KernelSpec& spec, const Mat& queries, const Mat& X);

// Run-config serialization: {"family": "se"|"matern", "nu": 2.5,
// "length_scale": 0.2}; nu present only for matern.
nlohmann::json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);

}  // namespace cei
