#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "cei/harness.hpp"

namespace fs = std::filesystem;

namespace cei {

namespace {

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  return RunConfig::from_json(j);
}

int run_and_report(RunConfig cfg) {
  const RunResult result = run_experiment(cfg);
  int failed = 0;
  for (const auto& t : result.trials) failed += t.failed ? 1 : 0;
  std::cout << "run complete: " << result.trials.size() << " trial(s), "
            << failed << " failed, artifacts in " << cfg.output_dir << "\n";
  if (!result.summary.empty()) {
    const auto& last = result.summary.back();
    std::cout << "final median regret (t=" << last.t
              << "): " << (last.n > 0 ? std::to_string(last.q50) : "n/a")
              << " over " << last.n << " contributing trial(s)\n";
  }
  return 0;
}

int parse_problem_id(const std::string& label) {
  static const std::map<std::string, int> ids = {
      {"p1", 1}, {"p2", 2}, {"p3", 3}, {"p4", 4}, {"p5", 5}};
  const auto it = ids.find(label);
  require(it != ids.end(), "unknown problem '" + label + "' (use p1..p5)");
  return it->second;
}

std::vector<RegretTrace> load_traces(const fs::path& run_dir) {
  std::vector<RegretTrace> traces;
  for (int i = 0;; ++i) {
    const fs::path p =
        run_dir / "trials" / ("trial_" + std::to_string(i) + ".jsonl");
    if (!fs::exists(p)) break;
    traces.push_back(read_trace_jsonl(p.string()));
  }
  if (traces.empty()) {
    throw IoError("no trial files under " + (run_dir / "trials").string());
  }
  return traces;
}

int cmd_verify_bounds(const std::string& run_dir) {
  const fs::path dir(run_dir);
  RunConfig cfg = load_config((dir / "config.json").string());
  const auto traces = load_traces(dir);
  const auto reports = bound_reports_for_run(cfg, traces);

  struct Row {
    int audited = 0;
    int flagged = 0;  // window exhausted, no t_k
    int violations = 0;
    bool heuristic = false;
  };
  std::map<int, Row> by_trial;
  long hard_violations = 0;
  for (const auto& [trial, rep] : reports) {
    Row& row = by_trial[trial];
    row.heuristic = rep.heuristic_b;
    if (rep.auditable) {
      ++row.audited;
      row.violations += rep.violations;
    } else {
      ++row.flagged;
    }
    const bool hard = !rep.heuristic_b && !rep.rhs_bayesian.has_value();
    if (hard) hard_violations += rep.violations;
  }

  std::cout << "trial  audited  flagged  violations  kind\n";
  for (const auto& [trial, row] : by_trial) {
    std::cout << trial << "\t" << row.audited << "\t" << row.flagged << "\t"
              << row.violations << "\t"
              << (row.heuristic ? "heuristic-B (soft)" : "exact") << "\n";
  }
  if (reports.empty()) {
    std::cout << "no auditable bound reports for this run kind\n";
  }
  std::cout << "hard violations: " << hard_violations << "\n";
  return hard_violations == 0 ? 0 : 2;
}

int cmd_plot(const std::string& run_dir, const std::string& style_name) {
  const fs::path dir(run_dir);
  std::ifstream in(dir / "summary.csv");
  if (!in) throw IoError("cannot open " + (dir / "summary.csv").string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto summary = summary_from_csv(buffer.str());
  const PlotStyle style = style_name == "regret_loglog"
                              ? PlotStyle::RegretLogLog
                              : PlotStyle::RegretLinear;
  const std::string svg = emit_plot_svg(summary, style);
  fs::create_directories(dir / "plots");
  const fs::path out = dir / "plots" / (style_name + ".svg");
  std::ofstream svg_out(out, std::ios::trunc);
  svg_out << svg;
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

void add_common_overrides(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--trials", cfg.n_trials, "number of trials");
  cmd->add_option("--iterations", cfg.n_iterations, "CEI iterations");
  cmd->add_option("--seed", cfg.base_seed, "base seed");
  cmd->add_option("--out", cfg.output_dir, "output directory");
  cmd->add_option("--lambda", cfg.lambda, "constraint tolerance");
  cmd->add_option("--delta", cfg.delta, "confidence level delta");
  cmd->add_option("--n-initial", cfg.n_initial,
                  "initial design size (0 = 10*dim)");
  cmd->add_option("--n-candidates", cfg.optimizer.n_candidates,
                  "acquisition candidate pool size (0 = auto)");
  cmd->add_option_function<std::string>(
         "--initial-design",
         [&cfg](const std::string& v) {
           cfg.initial_design =
               v == "uniform" ? DesignMode::Uniform : DesignMode::Halton;
         },
         "initial design mode")
      ->check(CLI::IsMember({"halton", "uniform"}));
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"cei-bench: constrained expected improvement optimizer and "
               "regret-bound benchmark harness"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config");
  run_cmd->add_option("--config", config_path, "JSON run config")->required();

  // bench
  RunConfig bench_cfg;
  bench_cfg.n_trials = 100;
  std::string bench_problem;
  auto* bench_cmd =
      app.add_subcommand("bench", "run one of the five benchmark problems");
  bench_cmd->add_option("--problem", bench_problem, "p1..p5")->required();
  bench_cmd->add_flag("--literal-p5",
                      bench_cfg.problem.p5_literal_constraint,
                      "use the literal printed form of P5's first constraint");
  add_common_overrides(bench_cmd, bench_cfg);

  // synthetic
  RunConfig synth_cfg;
  synth_cfg.n_trials = 100;
  std::string synth_setting;
  std::string synth_kernel = "se";
  double synth_length_scale = 0.2;
  auto* synth_cmd =
      app.add_subcommand("synthetic", "run a synthetic RKHS or GP experiment");
  synth_cmd->add_option("--setting", synth_setting, "rkhs or gp")
      ->required()
      ->check(CLI::IsMember({"rkhs", "gp"}));
  synth_cmd->add_option("--kernel", synth_kernel, "se or matern25")
      ->check(CLI::IsMember({"se", "matern25"}));
  synth_cmd->add_option("--dim", synth_cfg.problem.dim, "input dimension");
  synth_cmd->add_option("--length-scale", synth_length_scale,
                        "generator length scale");
  synth_cmd->add_option("--problem-seed", synth_cfg.problem.seed,
                        "generator base seed");
  add_common_overrides(synth_cmd, synth_cfg);

  // verify-bounds
  std::string verify_dir;
  auto* verify_cmd = app.add_subcommand(
      "verify-bounds", "recompute bound reports for a finished run");
  verify_cmd->add_option("--run-dir", verify_dir, "run directory")->required();

  // plot
  std::string plot_dir;
  std::string plot_style = "regret_linear";
  auto* plot_cmd = app.add_subcommand("plot", "render regret plots for a run");
  plot_cmd->add_option("--run-dir", plot_dir, "run directory")->required();
  plot_cmd->add_option("--style", plot_style, "plot style")
      ->check(CLI::IsMember({"regret_linear", "regret_loglog"}));

  // export-grid
  std::string grid_problem;
  int grid_resolution = 64;
  std::string grid_out;
  bool grid_literal_p5 = false;
  auto* grid_cmd = app.add_subcommand(
      "export-grid", "export objective/constraint values on a 2-d grid");
  grid_cmd->add_option("--problem", grid_problem, "p1..p5")->required();
  grid_cmd->add_option("--resolution", grid_resolution, "grid resolution")
      ->check(CLI::PositiveNumber);
  grid_cmd->add_option("--out", grid_out, "output CSV path (default stdout)");
  grid_cmd->add_flag("--literal-p5", grid_literal_p5,
                     "use the literal printed form of P5's first constraint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run_cmd->parsed()) {
      return run_and_report(load_config(config_path));
    }
    if (bench_cmd->parsed()) {
      bench_cfg.problem.kind = "benchmark";
      bench_cfg.problem.id = parse_problem_id(bench_problem);
      if (bench_cfg.output_dir == "out") {
        bench_cfg.output_dir = "out/bench_" + bench_problem;
      }
      return run_and_report(std::move(bench_cfg));
    }
    if (synth_cmd->parsed()) {
      synth_cfg.problem.kind = synth_setting;
      const KernelSpec k = synth_kernel == "se"
                               ? KernelSpec::se(synth_length_scale)
                               : KernelSpec::matern(2.5, synth_length_scale);
      synth_cfg.problem.kernel_f = k;
      synth_cfg.problem.kernel_c = k;
      if (synth_cfg.output_dir == "out") {
        synth_cfg.output_dir = "out/" + synth_setting + "_" + synth_kernel +
                               "_d" + std::to_string(synth_cfg.problem.dim);
      }
      return run_and_report(std::move(synth_cfg));
    }
    if (verify_cmd->parsed()) return cmd_verify_bounds(verify_dir);
    if (plot_cmd->parsed()) return cmd_plot(plot_dir, plot_style);
    if (grid_cmd->parsed()) {
      const Problem problem =
          make_benchmark(parse_problem_id(grid_problem), grid_literal_p5);
      const std::string csv = export_grid_csv(problem, grid_resolution);
      if (grid_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(grid_out, std::ios::trunc);
        if (!out) throw IoError("cannot write " + grid_out);
        out << csv;
        std::cout << "wrote " << grid_out << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cei
