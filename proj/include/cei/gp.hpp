#pragma once

#include <atomic>
#include <utility>
#include <vector>

#include "cei/kernels.hpp"

namespace cei {

// Training data for a single scalar function.
struct ObservationSet {
  Mat X;  // (t x d)
  Vec y;  // (t)

  void validate() const;
  Eigen::Index size() const { return X.rows(); }
  int dim() const { return static_cast<int>(X.cols()); }
};

struct Prediction {
  double mu;
  double sigma;
};

// Exact GP posterior, factorized once at fit time. Immutable afterwards;
// predict is safe for concurrent callers (the clamp counter is atomic).
class PosteriorModel {
 public:
  // noise_variance = 0 gives the noise-free posterior, stabilized by an
  // adaptive jitter ladder {1e-12, 1e-10, 1e-8, 1e-6} * trace(K)/t. The
  // jitter that succeeded is recorded in the model.
  static PosteriorModel fit(const KernelSpec& spec, const ObservationSet& data,
                            double noise_variance);

  Prediction predict(const Vec& x) const;
  void predict_batch(const Mat& pts, Vec& mu, Vec& sigma) const;

  const KernelSpec& spec() const { return spec_; }
  const Mat& train_x() const { return X_; }
  const Vec& train_y() const { return y_; }
  const Mat& chol_lower() const { return chol_L_; }
  const Vec& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  double noise_variance() const { return noise_variance_; }
  int dim() const { return static_cast<int>(X_.cols()); }
  long clamp_events() const { return clamp_events_.load(); }

  PosteriorModel(const PosteriorModel& other);
  PosteriorModel& operator=(const PosteriorModel& other);
  PosteriorModel(PosteriorModel&&) noexcept;
  PosteriorModel& operator=(PosteriorModel&&) noexcept;

 private:
  PosteriorModel() = default;

  KernelSpec spec_;
  Mat X_;
  Vec y_;
  Mat chol_L_;
  Vec alpha_;
  double jitter_ = 0.0;
  double noise_variance_ = 0.0;
  mutable std::atomic<long> clamp_events_{0};
};

// Standard GP log evidence:
//   -1/2 y^T (K + s^2 I)^-1 y - 1/2 log det(K + s^2 I) - t/2 log 2pi,
// evaluated with the same jitter the fit would use.
double log_marginal_likelihood(const KernelSpec& spec,
                               const ObservationSet& data,
                               double noise_variance);

// Grid-search maximum likelihood over length scales; ties go to the smaller
// length scale (more conservative extrapolation). Grid entries whose fit
// fails are skipped; if all fail, throws IllConditionedData.
PosteriorModel fit_mle(KernelFamily family, const ObservationSet& data,
                       double noise_variance,
                       const std::vector<double>& l_grid);

}  // namespace cei
