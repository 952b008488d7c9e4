#pragma once

#include <vector>

#include "cei/gp.hpp"

namespace cei {

// tau(z) = z*Phi(z) + phi(z). Strictly increasing, positive everywhere;
// EI factors as sigma * tau(z) for sigma > 0.
double tau(double z);

// max(incumbent - f_value, 0).
double improvement(double f_value, double incumbent);

// Closed-form EI; at sigma = 0 the continuity limit max(incumbent - mu, 0).
double expected_improvement(double mu, double sigma, double incumbent);

// Phi((lambda - mu_c) / sigma_c); at sigma_c = 0 the indicator of
// mu_c <= lambda. Feasibility convention is c(x) <= 0 (boundary feasible).
double probability_of_feasibility(double mu_c, double sigma_c, double lambda);

struct Incumbent {
  double value = 0.0;
  bool exists = false;
};

struct AcquisitionContext {
  const PosteriorModel* objective = nullptr;
  std::vector<const PosteriorModel*> constraints;  // m >= 1
  Incumbent incumbent;
  double lambda = 0.0;  // feasibility tolerance; 0 recovers standard CEI

  void validate() const;
};

// EI(x) * prod_i POF_i(x); requires an incumbent.
double cei_value(const AcquisitionContext& ctx, const Vec& x);

// prod_i POF_i(x); the fallback acquisition while no feasible sample exists.
double pof_only(const AcquisitionContext& ctx, const Vec& x);

// Batch forms over the rows of pts (used by the acquisition maximizer).
Vec cei_batch(const AcquisitionContext& ctx, const Mat& pts);
Vec pof_only_batch(const AcquisitionContext& ctx, const Mat& pts);

}  // namespace cei
