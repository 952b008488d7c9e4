#include "cei/kernels.hpp"

#include <cmath>

#include "cei/simd.hpp"

namespace cei {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt5 = 2.2360679774997896964;

double matern_scale(double nu) {
  if (nu == 0.5) return 1.0;
  if (nu == 1.5) return kSqrt3;
  return kSqrt5;
}

void check_point(const Vec& x, const char* what) {
  require(x.size() >= 1, std::string(what) + ": empty point");
  require(x.allFinite(), std::string(what) + ": non-finite coordinate");
}

}  // namespace

KernelSpec KernelSpec::se(double length_scale) {
  KernelSpec s;
  s.family = KernelFamily::SquaredExponential;
  s.length_scale = length_scale;
  s.validate();
  return s;
}

KernelSpec KernelSpec::matern(double nu, double length_scale) {
  KernelSpec s;
  s.family = KernelFamily::Matern;
  s.nu = nu;
  s.length_scale = length_scale;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  require(std::isfinite(length_scale) && length_scale > 0.0,
          "KernelSpec: length_scale must be positive");
  if (family == KernelFamily::Matern) {
    require(nu == 0.5 || nu == 1.5 || nu == 2.5,
            "KernelSpec: Matern nu must be one of {0.5, 1.5, 2.5}");
  }
}

double kernel_of_sqdist(const KernelSpec& spec, double r2) {
  if (r2 <= 0.0) return 1.0;
  if (spec.family == KernelFamily::SquaredExponential) {
    return std::exp(-r2 / (2.0 * spec.length_scale * spec.length_scale));
  }
  const double s =
      matern_scale(spec.nu) * std::sqrt(r2) / spec.length_scale;
  if (spec.nu == 0.5) return std::exp(-s);
  if (spec.nu == 1.5) return (1.0 + s) * std::exp(-s);
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double kernel_eval(const KernelSpec& spec, const Vec& a, const Vec& b) {
  spec.validate();
  check_point(a, "kernel_eval");
  check_point(b, "kernel_eval");
  require(a.size() == b.size(), "kernel_eval: dimension mismatch");
  return kernel_of_sqdist(spec, (a - b).squaredNorm());
}

void kernel_eval_batch(const KernelSpec& spec, const Mat& pts, const Vec& x,
                       double* out) {
  const auto n = static_cast<std::size_t>(pts.rows());
  simd::squared_distances(pts, x, out);
  if (spec.family == KernelFamily::SquaredExponential) {
    simd::se_transform(1.0 / (2.0 * spec.length_scale * spec.length_scale),
                       out, n);
  } else {
    simd::matern_transform(spec.nu,
                           matern_scale(spec.nu) / spec.length_scale, out, n);
  }
}

Mat kernel_gram(const KernelSpec& spec, const Mat& X) {
  spec.validate();
  require(X.rows() >= 1, "kernel_gram: empty point set");
  require(X.allFinite(), "kernel_gram: non-finite coordinate");
  const auto t = X.rows();
  Mat K(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < t; ++j) {
      const double k =
          kernel_of_sqdist(spec, (X.row(i) - X.row(j)).squaredNorm());
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

Mat kernel_cross(const KernelSpec& spec, const Mat& queries, const Mat& X) {
  require(queries.cols() == X.cols(), "kernel_cross: dimension mismatch");
  Mat K(queries.rows(), X.rows());
  Vec xj(X.cols());
  for (Eigen::Index j = 0; j < X.rows(); ++j) {
    xj = X.row(j).transpose();
    kernel_eval_batch(spec, queries, xj, K.col(j).data());
  }
  return K;
}

nlohmann::json kernel_to_json(const KernelSpec& spec) {
  nlohmann::json j;
  j["family"] =
      spec.family == KernelFamily::SquaredExponential ? "se" : "matern";
  if (spec.family == KernelFamily::Matern) j["nu"] = spec.nu;
  j["length_scale"] = spec.length_scale;
  return j;
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  require(j.is_object(), "kernel spec: expected object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    require(key == "family" || key == "nu" || key == "length_scale",
            "kernel spec: unknown key '" + key + "'");
  }
  require(j.contains("family") && j.contains("length_scale"),
          "kernel spec: 'family' and 'length_scale' required");
  const std::string family = j.at("family").get<std::string>();
  const double l = j.at("length_scale").get<double>();
  if (family == "se") {
    require(!j.contains("nu"), "kernel spec: 'nu' is only valid for matern");
    return KernelSpec::se(l);
  }
  require(family == "matern", "kernel spec: family must be 'se' or 'matern'");
  return KernelSpec::matern(j.value("nu", 2.5), l);
}

}  // namespace cei
