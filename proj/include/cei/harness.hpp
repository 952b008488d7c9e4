#pragma once

#include <string>
#include <vector>

#include "cei/diagnostics.hpp"

namespace cei {

enum class DesignMode { Halton, Uniform };

// What to optimize. Synthetic kinds ("rkhs", "gp") regenerate a fresh
// function per trial from seed + trial_index unless fresh_instance_per_trial
// is cleared.
struct ProblemSpec {
  std::string kind = "benchmark";  // benchmark | rkhs | gp
  int id = 1;                      // benchmark id
  bool p5_literal_constraint = false;
  std::uint64_t seed = 0;  // synthetic generator base seed
  int dim = 2;
  std::optional<KernelSpec> kernel_f;  // synthetic generator kernels
  std::optional<KernelSpec> kernel_c;
  bool fresh_instance_per_trial = true;

  void validate() const;
  bool synthetic() const { return kind != "benchmark"; }
  Problem materialize(int trial_index) const;
};

struct ModelConfig {
  enum class Hyper { Auto, Fixed, Mle };
  Hyper hyper = Hyper::Auto;  // Auto: Fixed for synthetics, Mle for benchmarks
  std::optional<KernelSpec> kernel_f;  // empty = generator kernel / SE default
  std::optional<KernelSpec> kernel_c;
  std::vector<double> mle_grid = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  double noise_variance = 0.0;
};

struct RunConfig {
  ProblemSpec problem;
  ModelConfig model;
  int n_initial = 0;  // 0 = auto: 10 * dim
  int n_iterations = 50;
  int n_trials = 100;
  std::uint64_t base_seed = 0;
  OptimizerConfig optimizer;
  double lambda = 0.0;
  double delta = 0.1;
  DesignMode initial_design = DesignMode::Halton;
  std::string output_dir = "out";

  void validate() const;
  int resolved_n_initial(int dim) const;
  nlohmann::json to_json() const;
  // Rejects unknown keys at every level.
  static RunConfig from_json(const nlohmann::json& j);
};

// Seeded design over the box; Halton by default, plain uniform available for
// strict replication. Deterministic per seed.
Mat initial_design(const Box& box, int n, std::uint64_t seed, DesignMode mode);

// One full CEI trial (Algorithm-1 loop). Stream tags: the initial design
// draws from derive_stream(seed, "init"), the iteration-t candidate pool from
// derive_stream(seed, "pool", t), with seed = base_seed + trial_index.
RegretTrace run_trial(const Problem& problem, const RunConfig& cfg,
                      int trial_index);

struct SummaryRow {
  int t = 0;
  double q25 = 0.0, q50 = 0.0, q75 = 0.0;
  int n = 0;  // contributing trials
};

struct RunResult {
  RunConfig config;
  std::vector<RegretTrace> trials;
  std::vector<SummaryRow> summary;
  std::vector<BoundReport> bound_reports;
};

// Runs all trials (parallel across CEI_BENCH_THREADS workers, 0 = auto),
// aggregates regret quantiles, and persists config.json, trials/*.jsonl,
// summary.csv, bounds.jsonl and plots/ under output_dir. Re-running the same
// config overwrites deterministically.
RunResult run_experiment(const RunConfig& cfg);

std::vector<SummaryRow> aggregate_summary(const std::vector<RegretTrace>& trials,
                                          int n_iterations);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_csv(const std::string& csv);

enum class PlotStyle { RegretLinear, RegretLogLog };

// Self-contained SVG: solid median, dashed quartiles, labeled axes. Log-log
// drops rows whose median is <= 0 and annotates how many were dropped;
// throws InvalidInput if nothing remains.
std::string emit_plot_svg(const std::vector<SummaryRow>& summary,
                          PlotStyle style);
std::string emit_plots(const RunResult& result, PlotStyle style);

int worker_threads();

// The bound reports a run writes to bounds.jsonl, keyed by trial index:
// frequentist audits with exact norms for RKHS runs, Bayesian audits with
// empirical proxies for GP runs, heuristic-B frequentist audits for
// benchmarks. verify-bounds recomputes these from the persisted traces.
std::vector<std::pair<int, BoundReport>> bound_reports_for_run(
    const RunConfig& cfg, const std::vector<RegretTrace>& trials);

// Trace persistence (JSONL, one record per line, meta line first).
void write_trace_jsonl(const RegretTrace& trace, const std::string& path);
RegretTrace read_trace_jsonl(const std::string& path);

int cli_main(int argc, char** argv);

}  // namespace cei
