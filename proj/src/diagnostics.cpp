#include "cei/diagnostics.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cei/normal.hpp"
#include "cei/rng.hpp"

namespace cei {

namespace {

constexpr double kPi = 3.14159265358979323846;

double c_gamma(double noise_variance) {
  return 2.0 / std::log1p(1.0 / noise_variance);
}

nlohmann::json opt_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::optional<double> RegretTrace::f_plus_at(int t) const {
  if (t <= 0) return incumbent_after_init;
  if (t > static_cast<int>(iters.size())) return std::nullopt;
  return iters[t - 1].f_plus;
}

Incumbent incumbent_from_trace(const RegretTrace& trace, int t,
                               double lambda) {
  Incumbent inc;
  auto consider = [&](double f, const std::vector<double>& c) {
    for (double v : c) {
      if (v > lambda) return;
    }
    if (!inc.exists || f < inc.value) {
      inc.exists = true;
      inc.value = f;
    }
  };
  for (const auto& rec : trace.initial) consider(rec.f, rec.c);
  for (const auto& rec : trace.iters) {
    if (rec.t > t) break;
    consider(rec.f, rec.c);
  }
  return inc;
}

RegretSeries simple_regret(const RegretTrace& trace, double f_star) {
  RegretSeries s;
  for (const auto& rec : trace.iters) {
    if (rec.f_plus) s.points.emplace_back(rec.t, *rec.f_plus - f_star);
  }
  s.no_incumbent = s.points.empty();
  return s;
}

double info_gain_of_set(const KernelSpec& spec, const Mat& X,
                        double noise_variance) {
  require(noise_variance > 0.0,
          "info_gain_of_set: noise_variance must be > 0");
  if (X.rows() == 0) return 0.0;
  Mat A = kernel_gram(spec, X) / noise_variance;
  A.diagonal().array() += 1.0;
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    throw IllConditionedData("info_gain_of_set: factorization failed");
  }
  return Mat(llt.matrixL()).diagonal().array().log().sum();
}

GreedyGainResult greedy_max_info_gain(const KernelSpec& spec, const Mat& grid,
                                      int T, double noise_variance) {
  require(T >= 1, "greedy_max_info_gain: T must be >= 1");
  require(grid.rows() >= T, "greedy_max_info_gain: grid smaller than T");
  require(noise_variance > 0.0,
          "greedy_max_info_gain: noise_variance must be > 0");
  const Eigen::Index n = grid.rows();

  GreedyGainResult result;
  std::vector<bool> taken(n, false);
  Mat selected(T, grid.cols());
  for (int step = 0; step < T; ++step) {
    Vec var = Vec::Ones(n);
    if (step > 0) {
      const Mat sel = selected.topRows(step);
      Mat K = kernel_gram(spec, sel);
      K.diagonal().array() += noise_variance;
      Eigen::LLT<Mat> llt(K);
      if (llt.info() != Eigen::Success) {
        throw IllConditionedData("greedy_max_info_gain: factorization failed");
      }
      Mat Vt = kernel_cross(spec, grid, sel).transpose();
      Mat(llt.matrixL())
          .triangularView<Eigen::Lower>()
          .solveInPlace(Vt);
      for (Eigen::Index i = 0; i < n; ++i) {
        var[i] = 1.0 - Vt.col(i).squaredNorm();
      }
    }
    int best = -1;
    double best_var = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!taken[i] && var[i] > best_var) {
        best_var = var[i];
        best = static_cast<int>(i);
      }
    }
    taken[best] = true;
    selected.row(step) = grid.row(best);
    result.picked.push_back(best);
    result.gamma.push_back(
        info_gain_of_set(spec, selected.topRows(step + 1), noise_variance));
  }
  return result;
}

VarianceSumCheck variance_sum_check(const KernelSpec& spec,
                                    const Mat& x_sequence,
                                    double noise_variance) {
  require(noise_variance > 0.0,
          "variance_sum_check: noise_variance must be > 0");
  const int T = static_cast<int>(x_sequence.rows());
  require(T >= 1, "variance_sum_check: empty sequence");

  double lhs = 1.0;  // prior sd at x_1
  for (int t = 2; t <= T; ++t) {
    ObservationSet prefix;
    prefix.X = x_sequence.topRows(t - 1);
    prefix.y = Vec::Zero(t - 1);
    const PosteriorModel m = PosteriorModel::fit(spec, prefix, noise_variance);
    lhs += m.predict(x_sequence.row(t - 1).transpose()).sigma;
  }
  const double gain = info_gain_of_set(spec, x_sequence, noise_variance);
  VarianceSumCheck out;
  out.lhs = lhs;
  out.rhs = std::sqrt(c_gamma(noise_variance) * T * gain);
  out.ok = lhs <= out.rhs + 1e-8;
  return out;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["t_k"] = t_k_found ? nlohmann::json(t_k) : nlohmann::json(nullptr);
  j["t_k_found"] = t_k_found;
  j["auditable"] = auditable;
  j["regret"] = regret;
  j["rhs_frequentist"] = rhs_frequentist;
  j["rhs_bayesian"] = opt_to_json(rhs_bayesian);
  j["b_f"] = b_f;
  j["b_c"] = b_c;
  j["c_tau_b"] = c_tau_b;
  j["gamma_t"] = gamma_t;
  j["info_gain_actual"] = info_gain_actual;
  j["violations"] = violations;
  j["heuristic_b"] = heuristic_b;
  return j;
}

BoundReport frequentist_bound_rhs(const RegretTrace& trace, double B_f,
                                  double B_c, int t) {
  return frequentist_bound_rhs(trace, B_f, std::vector<double>{B_c}, t);
}

BoundReport frequentist_bound_rhs(const RegretTrace& trace, double B_f,
                                  const std::vector<double>& B_cs, int t) {
  require(t >= 4, "frequentist_bound_rhs: t must be >= 4");
  require(!B_cs.empty(), "frequentist_bound_rhs: need a constraint norm");
  double B_c = 0.0;
  double pof_floor = 1.0;  // prod_i Phi(-B_{c_i})
  for (double b : B_cs) {
    require(b > 0.0, "frequentist_bound_rhs: norms must be positive");
    pof_floor *= norm_cdf(-b);
    B_c = std::max(B_c, b);
  }
  require(B_f > 0.0, "frequentist_bound_rhs: norms must be positive");
  require(trace.f_star.has_value(),
          "frequentist_bound_rhs: trace has no f_star");
  require(t <= static_cast<int>(trace.iters.size()),
          "frequentist_bound_rhs: trace shorter than t");

  BoundReport rep;
  rep.t = t;
  rep.b_f = B_f;
  rep.b_c = B_c;
  rep.c_tau_b = tau(B_f) / tau(-B_f);
  rep.gamma_t = std::numeric_limits<double>::quiet_NaN();
  rep.info_gain_actual = std::numeric_limits<double>::quiet_NaN();
  rep.rhs_frequentist = std::numeric_limits<double>::quiet_NaN();
  rep.regret = std::numeric_limits<double>::quiet_NaN();

  const auto fp_t = trace.f_plus_at(t);
  if (!fp_t) return rep;  // no incumbent yet: not auditable
  rep.regret = *fp_t - *trace.f_star;

  const int k = t / 2;
  const int hi = std::min(2 * k, t - 1);
  for (int cand = k; cand <= hi; ++cand) {
    const auto fp_a = trace.f_plus_at(cand);
    const auto fp_b = trace.f_plus_at(cand + 1);
    if (!fp_a || !fp_b) continue;
    const double drop = *fp_a - *fp_b;
    const double f_next = trace.iters[cand].f;  // f(x_{cand+1})
    if (drop < 2.0 * B_f / k && *fp_b <= f_next) {
      rep.t_k = cand;
      rep.t_k_found = true;
      break;
    }
  }
  if (!rep.t_k_found) return rep;

  const double sigma = trace.iters[rep.t_k].sigma_f_at_next + kBoundSigmaSlack;
  rep.rhs_frequentist = rep.c_tau_b / pof_floor *
                        (4.0 * B_f / (t - 2) + (0.4 + B_f) * sigma);
  rep.auditable = true;
  rep.violations = rep.regret > rep.rhs_frequentist + kBoundAbsSlack ? 1 : 0;
  return rep;
}

BoundReport bayesian_bound_rhs(const RegretTrace& trace, double B_c,
                               double M_f, double delta, int t, double gamma_t,
                               double noise_variance_for_cgamma) {
  require(t >= 4, "bayesian_bound_rhs: t must be >= 4");
  require(delta > 0.0 && delta < 1.0,
          "bayesian_bound_rhs: delta must be in (0,1)");
  require(trace.f_star.has_value(), "bayesian_bound_rhs: trace has no f_star");
  require(t <= static_cast<int>(trace.iters.size()),
          "bayesian_bound_rhs: trace shorter than t");

  const double beta = 2.0 * std::log(6.0 * kCAlpha / delta);
  const double pi_t = kPi * kPi * t * t / 6.0;
  const double beta_t = 2.0 * std::log(3.0 * pi_t / delta);
  const double cg = c_gamma(noise_variance_for_cgamma);

  BoundReport rep;
  rep.t = t;
  rep.b_f = M_f;
  rep.b_c = B_c;
  rep.c_tau_b = tau(std::sqrt(beta)) / tau(-std::sqrt(beta));
  rep.gamma_t = gamma_t;
  rep.rhs_frequentist = std::numeric_limits<double>::quiet_NaN();
  rep.regret = std::numeric_limits<double>::quiet_NaN();

  rep.info_gain_actual = std::numeric_limits<double>::quiet_NaN();
  if (trace.model_kernel_f) {
    Mat pts(t, trace.iters.front().x.size());
    for (int i = 0; i < t; ++i) pts.row(i) = trace.iters[i].x.transpose();
    rep.info_gain_actual =
        info_gain_of_set(*trace.model_kernel_f, pts, noise_variance_for_cgamma);
  }

  const auto fp_t = trace.f_plus_at(t);
  if (!fp_t) return rep;
  rep.regret = *fp_t - *trace.f_star;

  const double gain_term = std::sqrt(cg * t * gamma_t);
  const int k = t / 2;
  const int hi = std::min(2 * k, t - 1);
  for (int cand = k; cand <= hi; ++cand) {
    const auto fp_a = trace.f_plus_at(cand);
    if (!fp_a) continue;
    const double gap =
        std::max(*fp_a - trace.iters[cand].mu_f_at_next, 0.0);
    if (gap < 2.0 * M_f / k + std::sqrt(beta_t) / k * gain_term) {
      rep.t_k = cand;
      rep.t_k_found = true;
      break;
    }
  }
  if (!rep.t_k_found) return rep;

  const double sigma = trace.iters[rep.t_k].sigma_f_at_next + kBoundSigmaSlack;
  rep.rhs_bayesian =
      rep.c_tau_b / norm_cdf(-B_c) *
      (4.0 * M_f / (t - 2) + 2.0 * std::sqrt(beta_t) / (t - 2) * gain_term +
       (0.4 + std::sqrt(beta)) * sigma);
  rep.auditable = true;
  rep.violations = rep.regret > *rep.rhs_bayesian + kBoundAbsSlack ? 1 : 0;
  return rep;
}

std::vector<BoundReport> audit_frequentist(const RegretTrace& trace,
                                           double B_f, double B_c) {
  std::vector<BoundReport> reports;
  const int T = static_cast<int>(trace.iters.size());
  for (int t = 4; t <= T; ++t) {
    reports.push_back(frequentist_bound_rhs(trace, B_f, B_c, t));
  }
  return reports;
}

double confidence_violation_rate(const Problem& problem,
                                 const PosteriorModel& model, const Mat& grid,
                                 std::optional<double> b_f_override) {
  double B_f = 0.0;
  if (b_f_override) {
    B_f = *b_f_override;
  } else {
    require(problem.rkhs_norm_f.has_value(),
            "confidence_violation_rate: problem has no RKHS norm");
    B_f = *problem.rkhs_norm_f;
  }
  const Vec truth = problem.objective_batch(grid);
  Vec mu(grid.rows()), sigma(grid.rows());
  model.predict_batch(grid, mu, sigma);
  Eigen::Index violations = 0;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    if (std::abs(truth[i] - mu[i]) > B_f * sigma[i] + 1e-7) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(grid.rows());
}

IntervalRates bayesian_interval_rate(int seeds, double delta,
                                     const KernelSpec& spec, const Mat& design,
                                     const Vec& query,
                                     std::uint64_t seed_base) {
  require(seeds >= 1, "bayesian_interval_rate: seeds must be >= 1");
  require(delta > 0.0 && delta < 1.0,
          "bayesian_interval_rate: delta must be in (0,1)");
  const int t = static_cast<int>(design.rows());
  require(t >= 1, "bayesian_interval_rate: empty design");

  // Joint prior factor over [design; query], reused across seeds.
  Mat joint(t + 1, design.cols());
  joint.topRows(t) = design;
  joint.row(t) = query.transpose();
  Mat K = kernel_gram(spec, joint);
  K.diagonal().array() += 1e-10;
  Eigen::LLT<Mat> joint_llt(K);
  if (joint_llt.info() != Eigen::Success) {
    throw IllConditionedData("bayesian_interval_rate: joint Gram failed");
  }
  const Mat joint_L = joint_llt.matrixL();

  // Posterior factor over the design alone, also fixed across seeds.
  Mat Kd = kernel_gram(spec, design);
  Kd.diagonal().array() += 1e-10;
  Eigen::LLT<Mat> llt(Kd);
  if (llt.info() != Eigen::Success) {
    throw IllConditionedData("bayesian_interval_rate: design Gram failed");
  }
  Vec k_vec(t);
  kernel_eval_batch(spec, design, query, k_vec.data());
  const Vec v = Mat(llt.matrixL()).triangularView<Eigen::Lower>().solve(k_vec);
  const double sigma_q = std::sqrt(std::max(0.0, 1.0 - v.squaredNorm()));

  const double beta_fmu = 2.0 * std::log(1.0 / delta);
  const double beta_iei =
      std::max(1.44, 2.0 * std::log(kCAlpha / delta));

  long fmu_violations = 0;
  long iei_violations = 0;
  for (int s = 0; s < seeds; ++s) {
    CounterRng rng(derive_stream(seed_base, "interval", s));
    const Vec z = rng.normal_vec(t + 1);
    const Vec vals = joint_L * z;
    const Vec y = vals.head(t);
    const double f_q = vals[t];
    const Vec alpha = llt.solve(y);
    const double mu_q = k_vec.dot(alpha);
    if (std::abs(f_q - mu_q) > std::sqrt(beta_fmu) * sigma_q) {
      ++fmu_violations;
    }
    const double f_best = y.minCoeff();
    const double imp = improvement(f_q, f_best);
    const double ei = expected_improvement(mu_q, sigma_q, f_best);
    if (std::abs(imp - ei) > std::sqrt(beta_iei) * sigma_q) {
      ++iei_violations;
    }
  }
  IntervalRates rates;
  rates.fmu_violation_rate = static_cast<double>(fmu_violations) / seeds;
  rates.iei_violation_rate = static_cast<double>(iei_violations) / seeds;
  return rates;
}

}  // namespace cei
