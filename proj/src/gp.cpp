#include "cei/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cei {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

// Identifies the closest pair for the ill-conditioned error message.
std::string closest_pair_message(const Mat& X) {
  Eigen::Index bi = 0, bj = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) {
      const double d2 = (X.row(i) - X.row(j)).squaredNorm();
      if (d2 < best) {
        best = d2;
        bi = i;
        bj = j;
      }
    }
  }
  std::ostringstream os;
  os << "Cholesky failed at maximum jitter; closest points are #" << bi
     << " and #" << bj << " at distance " << std::sqrt(best);
  return os.str();
}

bool try_llt(const Mat& K, double diag_add, Mat& L_out) {
  Mat A = K;
  A.diagonal().array() += diag_add;
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) return false;
  L_out = llt.matrixL();
  return true;
}

}  // namespace

void ObservationSet::validate() const {
  require(X.rows() >= 1, "ObservationSet: need at least one observation");
  require(X.rows() == y.size(), "ObservationSet: |X| != |y|");
  require(X.allFinite() && y.allFinite(), "ObservationSet: non-finite value");
}

PosteriorModel::PosteriorModel(const PosteriorModel& other)
    : spec_(other.spec_),
      X_(other.X_),
      y_(other.y_),
      chol_L_(other.chol_L_),
      alpha_(other.alpha_),
      jitter_(other.jitter_),
      noise_variance_(other.noise_variance_),
      clamp_events_(other.clamp_events_.load()) {}

PosteriorModel& PosteriorModel::operator=(const PosteriorModel& other) {
  if (this != &other) {
    spec_ = other.spec_;
    X_ = other.X_;
    y_ = other.y_;
    chol_L_ = other.chol_L_;
    alpha_ = other.alpha_;
    jitter_ = other.jitter_;
    noise_variance_ = other.noise_variance_;
    clamp_events_.store(other.clamp_events_.load());
  }
  return *this;
}

PosteriorModel::PosteriorModel(PosteriorModel&& other) noexcept
    : spec_(other.spec_),
      X_(std::move(other.X_)),
      y_(std::move(other.y_)),
      chol_L_(std::move(other.chol_L_)),
      alpha_(std::move(other.alpha_)),
      jitter_(other.jitter_),
      noise_variance_(other.noise_variance_),
      clamp_events_(other.clamp_events_.load()) {}

PosteriorModel& PosteriorModel::operator=(PosteriorModel&& other) noexcept {
  spec_ = other.spec_;
  X_ = std::move(other.X_);
  y_ = std::move(other.y_);
  chol_L_ = std::move(other.chol_L_);
  alpha_ = std::move(other.alpha_);
  jitter_ = other.jitter_;
  noise_variance_ = other.noise_variance_;
  clamp_events_.store(other.clamp_events_.load());
  return *this;
}

PosteriorModel PosteriorModel::fit(const KernelSpec& spec,
                                   const ObservationSet& data,
                                   double noise_variance) {
  spec.validate();
  data.validate();
  require(std::isfinite(noise_variance) && noise_variance >= 0.0,
          "fit: noise_variance must be >= 0");

  const Mat K = kernel_gram(spec, data.X);
  const double base = K.trace() / static_cast<double>(K.rows());

  std::vector<double> ladder;
  if (noise_variance > 0.0) ladder.push_back(0.0);
  for (double j : {1e-12, 1e-10, 1e-8, 1e-6}) ladder.push_back(j * base);

  Mat L;
  double used_jitter = -1.0;
  for (double j : ladder) {
    if (try_llt(K, noise_variance + j, L)) {
      used_jitter = j;
      break;
    }
  }
  if (used_jitter < 0.0) throw IllConditionedData(closest_pair_message(data.X));

  PosteriorModel m;
  m.spec_ = spec;
  m.X_ = data.X;
  m.y_ = data.y;
  m.chol_L_ = std::move(L);
  m.jitter_ = used_jitter;
  m.noise_variance_ = noise_variance;
  m.alpha_ = m.chol_L_.triangularView<Eigen::Lower>().solve(data.y);
  m.chol_L_.transpose().triangularView<Eigen::Upper>().solveInPlace(m.alpha_);
  return m;
}

Prediction PosteriorModel::predict(const Vec& x) const {
  require(x.size() == X_.cols(), "predict: dimension mismatch");
  require(x.allFinite(), "predict: non-finite coordinate");
  Vec k_vec(X_.rows());
  kernel_eval_batch(spec_, X_, x, k_vec.data());
  const double mu = k_vec.dot(alpha_);
  const Vec v = chol_L_.triangularView<Eigen::Lower>().solve(k_vec);
  double var = 1.0 - v.squaredNorm();
  if (var < 0.0) {
    clamp_events_.fetch_add(1, std::memory_order_relaxed);
    var = 0.0;
  }
  return {mu, std::sqrt(var)};
}

void PosteriorModel::predict_batch(const Mat& pts, Vec& mu, Vec& sigma) const {
  require(pts.cols() == X_.cols(), "predict_batch: dimension mismatch");
  const Eigen::Index n = pts.rows();
  const Mat K_cross = kernel_cross(spec_, pts, X_);
  mu.noalias() = K_cross * alpha_;
  Mat Vt = K_cross.transpose();
  chol_L_.triangularView<Eigen::Lower>().solveInPlace(Vt);
  sigma.resize(n);
  long clamps = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double var = 1.0 - Vt.col(i).squaredNorm();
    if (var < 0.0) {
      ++clamps;
      var = 0.0;
    }
    sigma[i] = std::sqrt(var);
  }
  if (clamps > 0) clamp_events_.fetch_add(clamps, std::memory_order_relaxed);
}

double log_marginal_likelihood(const KernelSpec& spec,
                               const ObservationSet& data,
                               double noise_variance) {
  const PosteriorModel m = PosteriorModel::fit(spec, data, noise_variance);
  const double t = static_cast<double>(data.size());
  const double data_fit = data.y.dot(m.alpha());
  const double log_det =
      2.0 * m.chol_lower().diagonal().array().log().sum();
  return -0.5 * data_fit - 0.5 * log_det - 0.5 * t * std::log(kTwoPi);
}

PosteriorModel fit_mle(KernelFamily family, const ObservationSet& data,
                       double noise_variance,
                       const std::vector<double>& l_grid) {
  require(!l_grid.empty(), "fit_mle: empty length-scale grid");
  std::vector<double> grid = l_grid;
  std::sort(grid.begin(), grid.end());

  bool have_best = false;
  double best_lml = -std::numeric_limits<double>::infinity();
  double best_l = grid.front();
  std::string last_error;
  for (double l : grid) {
    KernelSpec spec;
    spec.family = family;
    spec.length_scale = l;
    try {
      const double lml = log_marginal_likelihood(spec, data, noise_variance);
      if (!have_best || lml > best_lml) {
        have_best = true;
        best_lml = lml;
        best_l = l;
      }
    } catch (const IllConditionedData& e) {
      last_error = e.what();
    }
  }
  if (!have_best) {
    throw IllConditionedData("fit_mle: every grid fit failed; last: " +
                             last_error);
  }
  KernelSpec spec;
  spec.family = family;
  spec.length_scale = best_l;
  return PosteriorModel::fit(spec, data, noise_variance);
}

}  // namespace cei
