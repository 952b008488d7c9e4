#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <utility>
#include <vector>

#include "cei/acquisition.hpp"
#include "cei/problems.hpp"

namespace cei {

// One CEI iteration. sigma/mu_f_at_next are the objective posterior at the
// chosen point before it was evaluated, i.e. sigma_{t-1}(x_t).
struct IterationRecord {
  int t = 0;  // 1-based CEI iteration
  Vec x;
  double f = 0.0;
  std::vector<double> c;
  bool feasible = false;  // all c_i <= 0
  std::optional<double> f_plus;  // incumbent after this iteration
  std::optional<double> regret;  // f_plus - f_star when both exist
  double acq_value = 0.0;
  double sigma_f_at_next = 0.0;
  double mu_f_at_next = 0.0;
  double jitter_used = 0.0;
  long clamp_events = 0;  // cumulative variance clamps up to this iteration
  long candidate_index = -1;
};

struct InitialRecord {
  Vec x;
  double f = 0.0;
  std::vector<double> c;
  bool feasible = false;
};

struct RegretTrace {
  nlohmann::json problem_meta;
  int trial_index = 0;
  std::uint64_t seed = 0;
  int n_initial = 0;
  std::vector<InitialRecord> initial;
  std::vector<IterationRecord> iters;

  std::optional<double> f_star;
  bool f_star_estimated = false;
  std::optional<double> b_f;                 // RKHS norm of f when known
  std::optional<std::vector<double>> b_c;    // RKHS norms of constraints
  std::optional<double> m_f;                 // empirical sup|f| (GP problems)
  std::optional<std::vector<double>> m_c;    // empirical sup|c_i| (GP problems)
  std::optional<KernelSpec> model_kernel_f;  // objective kernel at last refit
  std::optional<int> first_feasible_iteration;  // 0 = in the initial design
  std::optional<double> incumbent_after_init;

  bool failed = false;
  std::string failure;
  double wall_clock_seconds = 0.0;

  // f_plus indexed by iteration (0 = after the initial design).
  std::optional<double> f_plus_at(int t) const;
};

// Independent incumbent recomputation from the raw observations (tolerance
// lambda widens feasibility to c <= lambda).
Incumbent incumbent_from_trace(const RegretTrace& trace, int t,
                               double lambda = 0.0);

struct RegretSeries {
  std::vector<std::pair<int, double>> points;  // (t, r_t)
  bool no_incumbent = false;
};

RegretSeries simple_regret(const RegretTrace& trace, double f_star);

// 1/2 log det(I + K / noise_variance); 0 for the empty set.
double info_gain_of_set(const KernelSpec& spec, const Mat& X,
                        double noise_variance);

struct GreedyGainResult {
  std::vector<int> picked;           // grid indices in pick order
  std::vector<double> gamma;         // gamma_t for t = 1..T
};

// Sequential posterior-variance maximization over the candidate grid under
// observation noise; the greedy surrogate for the maximum information gain.
// Ties break to the lowest grid index.
GreedyGainResult greedy_max_info_gain(const KernelSpec& spec, const Mat& grid,
                                      int T, double noise_variance);

struct VarianceSumCheck {
  double lhs = 0.0;  // sum_t noisy sigma_{t-1}(x_t)
  double rhs = 0.0;  // sqrt(C_gamma * T * info gain of the sequence)
  bool ok = false;
};

VarianceSumCheck variance_sum_check(const KernelSpec& spec,
                                    const Mat& x_sequence,
                                    double noise_variance);

struct BoundReport {
  int t = 0;
  int t_k = -1;
  bool t_k_found = false;
  bool auditable = false;  // incumbent coverage and t_k both present
  double regret = 0.0;
  double rhs_frequentist = 0.0;
  std::optional<double> rhs_bayesian;
  double b_f = 0.0;
  double b_c = 0.0;
  double c_tau_b = 0.0;
  double gamma_t = 0.0;
  double info_gain_actual = 0.0;
  int violations = 0;
  bool heuristic_b = false;  // norms estimated, excluded from hard acceptance

  nlohmann::json to_json() const;
};

// Slack applied to bound comparisons: absolute, plus jitter slack added to
// posterior-sigma terms.
inline constexpr double kBoundAbsSlack = 1e-9;
inline constexpr double kBoundSigmaSlack = 1e-6;

// Theorem-style RHS at iteration t with the proof's t_k construction:
// k = floor(t/2), first index in [k, 2k] with
//   f+_{t_k} - f+_{t_k+1} < 2 B_f / k   and   f+_{t_k+1} <= f(x_{t_k+1});
// rhs = (tau(B_f)/tau(-B_f)) / Phi(-B_c)
//       * [4 B_f/(t-2) + (0.4 + B_f) sigma_{t_k}(x_{t_k+1})].
BoundReport frequentist_bound_rhs(const RegretTrace& trace, double B_f,
                                  double B_c, int t);

// Multi-constraint form: 1/Phi(-B_c) becomes prod_i 1/Phi(-B_{c_i}).
BoundReport frequentist_bound_rhs(const RegretTrace& trace, double B_f,
                                  const std::vector<double>& B_cs, int t);

// Bayesian RHS with beta = 2 log(6 c_alpha / delta), beta_t = 2 log(3 pi_t /
// delta), c_alpha = (1 + 2 pi) / (2 pi), pi_t = pi^2 t^2 / 6; t_k is the
// first index in [k, 2k] with
//   max{f+_{t_k} - mu_{t_k}(x_{t_k+1}), 0} < 2 M_f/k
//       + sqrt(beta_t)/k * sqrt(C_gamma t gamma_t).
BoundReport bayesian_bound_rhs(const RegretTrace& trace, double B_c,
                               double M_f, double delta, int t, double gamma_t,
                               double noise_variance_for_cgamma);

std::vector<BoundReport> audit_frequentist(const RegretTrace& trace,
                                           double B_f, double B_c);

// Fraction of grid points with |f(x) - mu(x)| > B_f sigma(x) + 1e-7; the
// noise-free RKHS confidence bound predicts exactly 0. b_f_override feeds
// the falsification check.
double confidence_violation_rate(const Problem& problem,
                                 const PosteriorModel& model, const Mat& grid,
                                 std::optional<double> b_f_override = {});

struct IntervalRates {
  double fmu_violation_rate = 0.0;  // |f - mu| > sqrt(beta) sigma
  double iei_violation_rate = 0.0;  // |I - EI| > sqrt(beta') sigma
};

// Empirical check of the 1-delta confidence statements: `seeds` GP-prior
// draws at a fixed design plus query point, violation frequencies of the
// |f - mu| interval (beta = 2 log(1/delta)) and of the |I - EI| interval
// (beta' = max{1.44, 2 log(c_alpha/delta)}).
IntervalRates bayesian_interval_rate(int seeds, double delta,
                                     const KernelSpec& spec, const Mat& design,
                                     const Vec& query,
                                     std::uint64_t seed_base = 0);

inline constexpr double kCAlpha = 1.1591549430918953358;  // (1+2pi)/(2pi)

}  // namespace cei
