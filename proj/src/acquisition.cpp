#include "cei/acquisition.hpp"

#include <cmath>
#include <limits>

#include "cei/normal.hpp"

namespace cei {

double tau(double z) {
  require(std::isfinite(z), "tau: non-finite input");
  const double v = z * norm_cdf(z) + norm_pdf(z);
  // tau is strictly positive (~ pdf(z)/z^2 as z -> -inf) but both terms
  // underflow past z ~ -38; keep the sign contract at the smallest double.
  if (v <= 0.0) return std::numeric_limits<double>::denorm_min();
  return v;
}

double improvement(double f_value, double incumbent) {
  require(std::isfinite(f_value) && std::isfinite(incumbent),
          "improvement: non-finite input");
  return std::max(incumbent - f_value, 0.0);
}

double expected_improvement(double mu, double sigma, double incumbent) {
  require(sigma >= 0.0, "expected_improvement: sigma must be >= 0");
  if (sigma == 0.0) return std::max(incumbent - mu, 0.0);
  const double z = (incumbent - mu) / sigma;
  return (incumbent - mu) * norm_cdf(z) + sigma * norm_pdf(z);
}

double probability_of_feasibility(double mu_c, double sigma_c, double lambda) {
  require(sigma_c >= 0.0, "probability_of_feasibility: sigma must be >= 0");
  require(lambda >= 0.0, "probability_of_feasibility: lambda must be >= 0");
  if (sigma_c == 0.0) return mu_c <= lambda ? 1.0 : 0.0;
  return norm_cdf((lambda - mu_c) / sigma_c);
}

void AcquisitionContext::validate() const {
  require(objective != nullptr, "AcquisitionContext: missing objective model");
  require(!constraints.empty(),
          "AcquisitionContext: need at least one constraint model");
  require(lambda >= 0.0, "AcquisitionContext: lambda must be >= 0");
}

// cei is literally EI times the pof_only product, so the factorization
// holds bitwise.
double cei_value(const AcquisitionContext& ctx, const Vec& x) {
  ctx.validate();
  if (!ctx.incumbent.exists) {
    throw NoIncumbent("cei: no feasible incumbent; use pof_only");
  }
  const Prediction pf = ctx.objective->predict(x);
  return expected_improvement(pf.mu, pf.sigma, ctx.incumbent.value) *
         pof_only(ctx, x);
}

double pof_only(const AcquisitionContext& ctx, const Vec& x) {
  ctx.validate();
  double value = 1.0;
  for (const PosteriorModel* c : ctx.constraints) {
    const Prediction pc = c->predict(x);
    value *= probability_of_feasibility(pc.mu, pc.sigma, ctx.lambda);
  }
  return value;
}

Vec cei_batch(const AcquisitionContext& ctx, const Mat& pts) {
  ctx.validate();
  if (!ctx.incumbent.exists) {
    throw NoIncumbent("cei_batch: no feasible incumbent; use pof_only");
  }
  const Eigen::Index n = pts.rows();
  Vec mu(n), sigma(n);
  ctx.objective->predict_batch(pts, mu, sigma);
  Vec out = pof_only_batch(ctx, pts);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = expected_improvement(mu[i], sigma[i], ctx.incumbent.value) *
             out[i];
  }
  return out;
}

Vec pof_only_batch(const AcquisitionContext& ctx, const Mat& pts) {
  ctx.validate();
  const Eigen::Index n = pts.rows();
  Vec out = Vec::Ones(n);
  Vec mu_c(n), sigma_c(n);
  for (const PosteriorModel* c : ctx.constraints) {
    c->predict_batch(pts, mu_c, sigma_c);
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] *= probability_of_feasibility(mu_c[i], sigma_c[i], ctx.lambda);
    }
  }
  return out;
}

}  // namespace cei
