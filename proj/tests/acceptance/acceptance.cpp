// Acceptance suite: one check per numbered criterion, each printing a
// single PASS/FAIL line. Run all with no arguments or one with
// --criterion N. Exit code 0 iff every selected criterion passed.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cei/acquisition.hpp"
#include "cei/diagnostics.hpp"
#include "cei/harness.hpp"
#include "cei/lowdisc.hpp"
#include "cei/normal.hpp"
#include "cei/rng.hpp"

using namespace cei;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void note(const std::string& text) {
    detail << (detail.str().empty() ? "" : "; ") << text;
  }
};

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cei_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Mat random_unit_points(int n, int d, std::uint64_t seed) {
  CounterRng rng(seed);
  Mat X(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = rng.next_double();
  }
  return X;
}

// Random design thinned to a minimum separation: keeps the Gram conditioned
// so the criterion's dense-inverse oracle is meaningful at 1e-8.
Mat separated_points(int n, int d, double min_sep, std::uint64_t seed) {
  CounterRng rng(seed);
  Mat X(n, d);
  int kept = 0;
  int attempts = 0;
  while (kept < n && attempts < 20000) {
    ++attempts;
    Vec cand(d);
    for (int j = 0; j < d; ++j) cand[j] = rng.next_double();
    bool ok = true;
    for (int i = 0; i < kept; ++i) {
      if ((X.row(i).transpose() - cand).norm() < min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) X.row(kept++) = cand.transpose();
  }
  return X.topRows(kept);
}

double median_at(const std::vector<SummaryRow>& rows, int t) {
  for (const auto& r : rows) {
    if (r.t == t && r.n > 0) return r.q50;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// least-squares slope of log(median) against log(t) over t in [5, 50]
double loglog_slope(const std::vector<SummaryRow>& rows, int* used) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.t < 5 || r.t > 50 || r.n == 0 || !(r.q50 > 0.0)) continue;
    const double x = std::log(static_cast<double>(r.t));
    const double y = std::log(r.q50);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  *used = n;
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_1() {
  Outcome out;
  CounterRng rng(42);
  const int n_draws = 1000000;
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = 4.0 * rng.next_double() - 2.0;
    const double sigma = 0.01 + 1.99 * rng.next_double();
    const double incumbent = 4.0 * rng.next_double() - 2.0;
    CounterRng draws(derive_stream(7, "mc", trial));
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_draws; ++i) {
      const double y = mu + sigma * draws.next_normal();
      const double imp = y < incumbent ? incumbent - y : 0.0;
      sum += imp;
      sum_sq += imp * imp;
    }
    const double mean = sum / n_draws;
    const double se_est = std::sqrt(
        std::max(0.0, sum_sq / n_draws - mean * mean) / n_draws);
    const double closed = expected_improvement(mu, sigma, incumbent);
    // Deep in the tail the sample can contain zero improvements and the
    // estimated SE collapses; the exact second moment
    // E[((inc-Y)^+)^2] = sigma^2 [(1+z^2) Phi(z) + z phi(z)] gives the true
    // sampling error of the oracle there.
    const double z = (incumbent - mu) / sigma;
    const double second_moment =
        sigma * sigma * ((1.0 + z * z) * norm_cdf(z) + z * norm_pdf(z));
    const double se_true = std::sqrt(
        std::max(0.0, second_moment - closed * closed) / n_draws);
    const double tol = 4.0 * std::max(se_est, se_true) + 1e-12;
    if (std::abs(closed - mean) > tol) {
      out.expect(false, "triple " + std::to_string(trial) + " off by " +
                            std::to_string(std::abs(closed - mean)) +
                            " (tol=" + std::to_string(tol) + ")");
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_2() {
  Outcome out;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int d = 1 + static_cast<int>(seed % 6);
    const int n_target =
        std::min<int>(20, 3 + 4 * d + static_cast<int>(seed % 3));
    const KernelSpec spec =
        (seed % 2 == 0) ? KernelSpec::se(0.2) : KernelSpec::matern(2.5, 0.2);
    const RkhsSample f = draw_rkhs_sample(spec, Box::unit(d), seed + 300);
    ObservationSet data;
    data.X = separated_points(n_target, d, 0.12, seed);
    data.y = f.value_batch(data.X);
    const int t = static_cast<int>(data.X.rows());
    const PosteriorModel m = PosteriorModel::fit(spec, data, 0.0);

    Vec mu(t), sigma(t);
    m.predict_batch(data.X, mu, sigma);
    out.expect((mu - data.y).cwiseAbs().maxCoeff() <= 1e-6,
               "interpolation mean off at seed " + std::to_string(seed));
    out.expect(sigma.maxCoeff() <= 1e-4,
               "interpolation sd off at seed " + std::to_string(seed));

    const Mat K = kernel_gram(spec, data.X) +
                  (m.noise_variance() + m.jitter()) * Mat::Identity(t, t);
    const Mat Kinv = K.inverse();
    const Mat queries = random_unit_points(20, d, seed + 900);
    for (int i = 0; i < 20; ++i) {
      const Vec q = queries.row(i).transpose();
      Vec k_vec(t);
      kernel_eval_batch(spec, data.X, q, k_vec.data());
      const double mu_dense = k_vec.dot(Kinv * data.y);
      const double var_dense = 1.0 - k_vec.dot(Kinv * k_vec);
      const Prediction p = m.predict(q);
      out.expect(std::abs(p.mu - mu_dense) <= 1e-8,
                 "dense-mean mismatch at seed " + std::to_string(seed));
      out.expect(std::abs(p.sigma - std::sqrt(std::max(0.0, var_dense))) <=
                     1e-8,
                 "dense-sd mismatch at seed " + std::to_string(seed));
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_3() {
  Outcome out;
  const KernelSpec spec = KernelSpec::se(0.2);

  // Lemma A.4 ordering across noise levels
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RkhsSample f = draw_rkhs_sample(spec, Box::unit(2), seed);
    ObservationSet data;
    data.X = random_unit_points(12, 2, seed + 1);
    data.y = f.value_batch(data.X);
    const PosteriorModel exact = PosteriorModel::fit(spec, data, 0.0);
    const Mat queries = random_unit_points(50, 2, seed + 2);
    for (double noise : {1e-4, 1e-2, 1.0}) {
      const PosteriorModel noisy = PosteriorModel::fit(spec, data, noise);
      Vec mu_a(50), s_a(50), mu_b(50), s_b(50);
      exact.predict_batch(queries, mu_a, s_a);
      noisy.predict_batch(queries, mu_b, s_b);
      for (int i = 0; i < 50; ++i) {
        out.expect(s_a[i] <= s_b[i] + 1e-10, "A.4 ordering violated");
      }
    }
  }

  // Lemma A.6 envelope
  {
    CounterRng rng(5);
    for (int i = 0; i < 2000; ++i) {
      const double mu = 6.0 * rng.next_double() - 3.0;
      const double s = 0.05 + 2.0 * rng.next_double();
      const double inc = 6.0 * rng.next_double() - 3.0;
      const double z = (inc - mu) / s;
      const double ratio = expected_improvement(mu, s, inc) / s;
      out.expect(ratio >= z - 1e-12, "A.6 lower envelope violated");
      const double upper = z < 0.0 ? norm_pdf(z) : z + norm_pdf(z);
      out.expect(ratio < upper + 1e-12, "A.6 upper envelope violated");
    }
  }

  // Lemmas B.1 boundedness, B.2 zero violation, B.3 gap, B.4 ratio
  int b2_nonzero = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Problem p = sample_rkhs_problem(spec, spec, 2, 5000 + seed);
    const double B = *p.rkhs_norm_f;
    const Mat grid = halton_unit(10000, 2, 31);
    const Vec truth = p.objective_batch(grid);
    out.expect(truth.cwiseAbs().maxCoeff() <= B,
               "B.1 |f| > B_f at seed " + std::to_string(seed));

    ObservationSet data;
    data.X = random_unit_points(15, 2, seed + 40);
    data.y = p.objective_batch(data.X);
    const PosteriorModel m = PosteriorModel::fit(spec, data, 0.0);
    if (confidence_violation_rate(p, m, grid) != 0.0) ++b2_nonzero;

    Vec mu(grid.rows()), s(grid.rows());
    m.predict_batch(grid, mu, s);
    const double f_best = data.y.minCoeff();
    const double ratio = tau(B) / tau(-B);
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      const double imp = improvement(truth[i], f_best);
      const double ei = expected_improvement(mu[i], s[i], f_best);
      out.expect(imp - ei <= B * s[i] + 1e-9, "B.3 gap violated");
      out.expect(imp <= ratio * ei + 1e-9, "B.4 ratio violated");
    }
  }
  out.expect(b2_nonzero == 0,
             "B.2 violation rate nonzero on " + std::to_string(b2_nonzero) +
                 " seeds");

  // Lemma A.3 variance sums, 50 sequences across both kernel families
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const KernelSpec k =
        (seed % 2 == 0) ? KernelSpec::se(0.2) : KernelSpec::matern(2.5, 0.2);
    const Mat seq = halton_unit(20, 2, 700 + seed);
    const VarianceSumCheck c = variance_sum_check(k, seq, 0.01);
    out.expect(c.ok, "A.3 variance sum violated at seed " +
                         std::to_string(seed));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_4() {
  Outcome out;
  const double delta = 0.05;
  const int seeds = 2000;
  const KernelSpec spec = KernelSpec::se(0.2);
  const Mat design = halton_unit(8, 2, 17);
  Vec query(2);
  query << 0.41, 0.62;
  const IntervalRates r =
      bayesian_interval_rate(seeds, delta, spec, design, query, 11);
  const double envelope =
      delta + 3.0 * std::sqrt(delta * (1.0 - delta) / seeds);
  out.note("C.2 rate " + std::to_string(r.fmu_violation_rate) + ", C.5 rate " +
           std::to_string(r.iei_violation_rate) + ", envelope " +
           std::to_string(envelope));
  out.expect(r.fmu_violation_rate <= envelope, "C.2 rate above envelope");
  out.expect(r.iei_violation_rate <= envelope, "C.5 rate above envelope");
  return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_5() {
  Outcome out;
  RunConfig cfg;
  cfg.problem.kind = "rkhs";
  cfg.problem.dim = 2;
  cfg.problem.kernel_f = KernelSpec::se(0.2);
  cfg.problem.kernel_c = KernelSpec::se(0.2);
  cfg.n_trials = 20;
  cfg.n_iterations = 50;
  cfg.base_seed = 100;
  cfg.output_dir = scratch_dir("criterion5").string();
  const RunResult result = run_experiment(cfg);

  int failed = 0, auditable = 0, flagged = 0, violations = 0;
  for (const auto& trace : result.trials) {
    if (trace.failed) {
      ++failed;
      continue;
    }
    const auto reports =
        audit_frequentist(trace, *trace.b_f, trace.b_c->front());
    for (const auto& rep : reports) {
      if (rep.auditable) {
        ++auditable;
        violations += rep.violations;
      } else {
        ++flagged;
      }
    }
  }
  out.note(std::to_string(auditable) + " auditable t, " +
           std::to_string(flagged) + " flagged, " + std::to_string(violations) +
           " violations");
  out.expect(failed == 0, std::to_string(failed) + " trials failed");
  out.expect(auditable > 0, "nothing auditable");
  out.expect(violations == 0, "hard bound violations present");
  return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_6() {
  Outcome out;
  int setting_idx = 0;
  for (const std::string kind : {"rkhs", "gp"}) {
    for (const std::string kernel : {"se", "matern25"}) {
      for (const int dim : {2, 4}) {
        RunConfig cfg;
        cfg.problem.kind = kind;
        cfg.problem.dim = dim;
        const KernelSpec k = kernel == "se" ? KernelSpec::se(0.2)
                                            : KernelSpec::matern(2.5, 0.2);
        cfg.problem.kernel_f = k;
        cfg.problem.kernel_c = k;
        cfg.n_trials = 20;
        cfg.n_iterations = 50;
        cfg.base_seed = 2000 + 111 * setting_idx;
        cfg.output_dir =
            scratch_dir("criterion6_" + kind + "_" + kernel + "_d" +
                        std::to_string(dim))
                .string();
        const RunResult result = run_experiment(cfg);
        const std::string label = kind + "/" + kernel + "/d" +
                                  std::to_string(dim);

        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : result.summary) {
          if (row.n == 0) continue;
          out.expect(row.q50 <= prev + 1e-9,
                     label + ": median regret increased at t=" +
                         std::to_string(row.t));
          prev = row.q50;
        }
        const double m10 = median_at(result.summary, 10);
        const double m50 = median_at(result.summary, 50);
        out.expect(std::isfinite(m10) && std::isfinite(m50),
                   label + ": missing medians");
        out.expect(m50 < m10, label + ": median r_50 not below median r_10");
        int used = 0;
        const double slope = loglog_slope(result.summary, &used);
        out.expect(used >= 10, label + ": too few positive medians for slope");
        out.expect(slope < 0.0,
                   label + ": log-log slope " + std::to_string(slope));
        ++setting_idx;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_7() {
  Outcome out;
  const double expected_fstar[5] = {0.25, 0.6, 0.0, -3.32, 0.0};
  for (int id = 1; id <= 5; ++id) {
    const Problem p = make_benchmark(id);
    out.expect(p.f_star.has_value() && *p.f_star == expected_fstar[id - 1],
               "p" + std::to_string(id) + ": f* metadata mismatch");

    RunConfig cfg;
    cfg.problem.kind = "benchmark";
    cfg.problem.id = id;
    cfg.n_trials = 20;
    cfg.n_iterations = 50;
    cfg.base_seed = 500 + id;
    cfg.output_dir = scratch_dir("criterion7_p" + std::to_string(id)).string();
    const RunResult result = run_experiment(cfg);
    const std::string label = "p" + std::to_string(id);

    const double m5 = median_at(result.summary, 5);
    const double m50 = median_at(result.summary, 50);
    out.expect(std::isfinite(m50), label + ": no contributing trials at t=50");
    if (std::isfinite(m5) && std::isfinite(m50)) {
      out.expect(m50 < m5, label + ": median regret at 50 (" +
                               std::to_string(m50) + ") not below t=5 (" +
                               std::to_string(m5) + ")");
    }

    if (id == 1) {
      int found = 0;
      for (const auto& trace : result.trials) {
        if (!trace.failed && trace.first_feasible_iteration.has_value()) {
          ++found;
        }
      }
      out.note("p1 feasible in " + std::to_string(found) + "/20 trials");
      out.expect(found >= 19, "p1: fewer than 95% of trials found a feasible "
                              "sample within budget");
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_8() {
  Outcome out;
  const Mat grid = halton_unit(400, 2, 9);
  const GreedyGainResult se =
      greedy_max_info_gain(KernelSpec::se(0.2), grid, 100, 0.01);
  const GreedyGainResult matern =
      greedy_max_info_gain(KernelSpec::matern(2.5, 0.2), grid, 100, 0.01);
  const double se_10 = se.gamma[9], se_100 = se.gamma[99];
  out.note("SE gamma_10=" + std::to_string(se_10) + " gamma_100=" +
           std::to_string(se_100) + " matern gamma_100=" +
           std::to_string(matern.gamma[99]));
  out.expect(se_100 / 100.0 < se_10 / 10.0, "SE greedy-gamma not sublinear");
  out.expect(matern.gamma[99] > se_100,
             "Matern-2.5 greedy-gamma not above SE");
  return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_9() {
  Outcome out;
  RunConfig cfg;
  cfg.problem.kind = "rkhs";
  cfg.problem.dim = 2;
  cfg.problem.kernel_f = KernelSpec::se(0.2);
  cfg.problem.kernel_c = KernelSpec::se(0.2);
  cfg.n_trials = 2;
  cfg.n_iterations = 8;
  cfg.base_seed = 77;

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  const fs::path dir_a = scratch_dir("criterion9_a");
  const fs::path dir_b = scratch_dir("criterion9_b");
  cfg.output_dir = dir_a.string();
  const RunResult a = run_experiment(cfg);
  cfg.output_dir = dir_b.string();
  const RunResult b = run_experiment(cfg);

  out.expect(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"),
             "summary.csv differs across runs");
  for (int i = 0; i < cfg.n_trials; ++i) {
    if (a.trials[i].iters.size() != b.trials[i].iters.size()) {
      out.expect(false, "trace lengths differ");
      continue;
    }
    for (std::size_t t = 0; t < a.trials[i].iters.size(); ++t) {
      out.expect(a.trials[i].iters[t].candidate_index ==
                     b.trials[i].iters[t].candidate_index,
                 "candidate index differs at trial " + std::to_string(i) +
                     " t=" + std::to_string(t + 1));
    }
  }

  // overwriting the same directory reproduces the same bytes
  const std::string first = slurp(dir_a / "summary.csv");
  cfg.output_dir = dir_a.string();
  run_experiment(cfg);
  out.expect(slurp(dir_a / "summary.csv") == first,
             "re-run into the same directory changed summary.csv");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "EI closed form vs monte-carlo oracle", criterion_1},
    {2, "GP interpolation and dense-inverse equivalence", criterion_2},
    {3, "deterministic lemma suite", criterion_3},
    {4, "probabilistic interval lemmas at delta=0.05", criterion_4},
    {5, "frequentist regret-bound audit on RKHS runs", criterion_5},
    {6, "synthetic convergence reproduction", criterion_6},
    {7, "benchmark sanity", criterion_7},
    {8, "greedy information-gain rates", criterion_8},
    {9, "determinism of runs", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }

  bool all_pass = true;
  for (const auto& criterion : kCriteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out = criterion.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion "
              << criterion.id << ": " << criterion.name << " ("
              << std::fixed << std::setprecision(1) << secs << "s)";
    const std::string detail = out.detail.str();
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << "\n" << std::defaultfloat;
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
