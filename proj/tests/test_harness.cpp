#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cei/acquisition.hpp"
#include "cei/harness.hpp"
#include "cei/rng.hpp"

using namespace cei;
namespace fs = std::filesystem;

namespace {

// Minimal well-formedness check: tags balance and nest properly.
bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = text.find('<', i)) != std::string::npos) {
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    const bool closing = tag[0] == '/';
    const bool self_closing = tag.back() == '/';
    if (closing) tag = tag.substr(1);
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

Problem always_feasible_problem() {
  Problem p;
  p.name = "smooth-feasible";
  p.dim = 2;
  p.box = Box::unit(2);
  p.objective = [](const Vec& x) {
    return std::sin(3.0 * x[0]) + x[1] * x[1] - 0.5 * x[1];
  };
  p.constraints = {[](const Vec&) { return -10.0; }};
  p.objective_batch = [&p](const Mat& pts) {
    Vec out(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      out[i] = std::sin(3.0 * pts(i, 0)) + pts(i, 1) * pts(i, 1) -
               0.5 * pts(i, 1);
    }
    return out;
  };
  p.constraints_batch = {
      [](const Mat& pts) { return Vec::Constant(pts.rows(), -10.0); }};
  p.f_star = -0.0625;  // not used by these tests
  p.meta = {{"kind", "custom"}};
  return p;
}

RunConfig small_p2_config(const std::string& out_dir) {
  RunConfig cfg;
  cfg.problem.kind = "benchmark";
  cfg.problem.id = 2;
  cfg.n_trials = 2;
  cfg.n_iterations = 5;
  cfg.n_initial = 8;
  cfg.optimizer.n_candidates = 256;
  cfg.optimizer.refine_steps = 15;
  cfg.base_seed = 11;
  cfg.output_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("initial design basics") {
  const Box box = Box::unit(3);
  const Mat one = initial_design(box, 1, 5, DesignMode::Halton);
  CHECK(one.rows() == 1);
  CHECK(box.contains(one.row(0).transpose()));

  for (DesignMode mode : {DesignMode::Halton, DesignMode::Uniform}) {
    const Mat a = initial_design(box, 20, 3, mode);
    const Mat b = initial_design(box, 20, 3, mode);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 20; ++i) {
      CHECK(box.contains(a.row(i).transpose()));
      for (int j = i + 1; j < 20; ++j) {
        CHECK((a.row(i) - a.row(j)).norm() > 0.0);
      }
    }
    const Mat c = initial_design(box, 20, 4, mode);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("run_trial: trace shape, incumbent correctness, loop safety") {
  const Problem p2 = make_benchmark(2);
  RunConfig cfg = small_p2_config("unused");
  const RegretTrace trace = run_trial(p2, cfg, 0);

  CHECK(!trace.failed);
  CHECK(trace.n_initial == 8);
  CHECK(trace.initial.size() == 8);
  CHECK(trace.iters.size() == 5);

  // incumbent recomputed independently from the raw records
  for (int t = 1; t <= 5; ++t) {
    const Incumbent inc = incumbent_from_trace(trace, t, cfg.lambda);
    const auto& rec = trace.iters[t - 1];
    if (inc.exists) {
      REQUIRE(rec.f_plus.has_value());
      CHECK(*rec.f_plus == inc.value);
      CHECK(*rec.regret == doctest::Approx(inc.value - 0.6).epsilon(1e-12));
    } else {
      CHECK(!rec.f_plus.has_value());
    }
  }
  // incumbents never increase
  for (std::size_t i = 1; i < trace.iters.size(); ++i) {
    if (trace.iters[i - 1].f_plus && trace.iters[i].f_plus) {
      CHECK(*trace.iters[i].f_plus <= *trace.iters[i - 1].f_plus + 1e-15);
    }
  }

  // no two samples within the duplicate threshold (box-width scaled)
  std::vector<Vec> all;
  for (const auto& r : trace.initial) all.push_back(r.x);
  for (const auto& r : trace.iters) all.push_back(r.x);
  const Vec w = p2.box.width();
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      double scaled = 0.0;
      for (int d = 0; d < 2; ++d) {
        scaled = std::max(scaled, std::abs(all[i][d] - all[j][d]) / w[d]);
      }
      CHECK(scaled >= kDuplicateTol);
    }
  }

  // iteration metadata is populated
  for (const auto& rec : trace.iters) {
    CHECK(rec.candidate_index >= 0);
    CHECK(rec.sigma_f_at_next >= 0.0);
    CHECK(std::isfinite(rec.acq_value));
    CHECK(rec.jitter_used >= 0.0);
  }

  cfg.n_iterations = 0;
  const RegretTrace only_init = run_trial(p2, cfg, 0);
  CHECK(only_init.initial.size() == 8);
  CHECK(only_init.iters.empty());
}

TEST_CASE("all-feasible constraints reduce CEI to an EI-only loop") {
  const Problem p = always_feasible_problem();
  RunConfig cfg;
  cfg.problem.kind = "benchmark";  // unused; run_trial takes the problem
  cfg.model.hyper = ModelConfig::Hyper::Fixed;
  cfg.model.kernel_f = KernelSpec::se(0.3);
  cfg.model.kernel_c = KernelSpec::se(1.5);
  cfg.n_initial = 12;
  cfg.n_iterations = 6;
  cfg.base_seed = 3;
  cfg.optimizer.n_candidates = 512;
  cfg.optimizer.refine_steps = 25;

  const RegretTrace trace = run_trial(p, cfg, 0);
  REQUIRE(!trace.failed);
  REQUIRE(trace.iters.size() == 6);
  CHECK(trace.first_feasible_iteration.has_value());
  CHECK(*trace.first_feasible_iteration == 0);

  // reference implementation: same seeds and maximizer, EI only (POF = 1)
  const std::uint64_t seed = cfg.base_seed;
  Mat X = initial_design(p.box, 12, derive_stream(seed, "init"),
                         DesignMode::Halton);
  Vec y(12 + 6);
  for (int i = 0; i < 12; ++i) y[i] = p.objective(X.row(i).transpose());
  Mat Xa(12 + 6, 2);
  Xa.topRows(12) = X;
  int count = 12;
  for (int t = 1; t <= 6; ++t) {
    ObservationSet data{Xa.topRows(count), y.head(count)};
    const PosteriorModel model =
        PosteriorModel::fit(*cfg.model.kernel_f, data, 0.0);
    const double incumbent = y.head(count).minCoeff();
    OptimizerConfig ocfg = cfg.optimizer;
    ocfg.seed = derive_stream(seed, "pool", static_cast<std::uint64_t>(t));
    const Mat X_cur = Xa.topRows(count);
    const MaximizeResult res = maximize(
        [&](const Mat& pts) {
          Vec mu(pts.rows()), sigma(pts.rows());
          model.predict_batch(pts, mu, sigma);
          Vec out(pts.rows());
          for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            out[i] = expected_improvement(mu[i], sigma[i], incumbent);
          }
          return out;
        },
        p.box, ocfg, &X_cur);
    Vec x_next = res.x;
    if (is_duplicate_of_any(x_next, X_cur, p.box)) {
      x_next = perturb_duplicate(std::move(x_next), X_cur, p.box);
    }

    const auto& rec = trace.iters[t - 1];
    CHECK(rec.candidate_index == res.candidate_index);
    CHECK((rec.x - x_next).cwiseAbs().maxCoeff() == 0.0);

    Xa.row(count) = x_next.transpose();
    y[count] = p.objective(x_next);
    ++count;
  }
}

TEST_CASE("p1 with seed 0: feasibility found via the POF fallback") {
  // regression snapshot from a pilot run at defaults: the initial design
  // has no feasible point, and the feasibility search lands one at t = 1
  const Problem p1 = make_benchmark(1);
  RunConfig cfg;
  cfg.problem.kind = "benchmark";
  cfg.problem.id = 1;
  cfg.n_iterations = 3;
  cfg.base_seed = 0;
  const RegretTrace trace = run_trial(p1, cfg, 0);
  REQUIRE(!trace.failed);
  bool init_feasible = false;
  for (const auto& rec : trace.initial) init_feasible |= rec.feasible;
  CHECK(!init_feasible);
  CHECK(!trace.incumbent_after_init.has_value());
  REQUIRE(trace.first_feasible_iteration.has_value());
  CHECK(*trace.first_feasible_iteration == 1);
  CHECK(trace.iters[0].f_plus.has_value());
}

TEST_CASE("tolerance lambda widens incumbent feasibility in the loop") {
  // constraint sits in (0, 0.05] everywhere: infeasible strictly, feasible
  // once lambda = 0.1 admits it
  Problem p;
  p.name = "near-feasible";
  p.dim = 2;
  p.box = Box::unit(2);
  p.objective = [](const Vec& x) { return x[0] + x[1]; };
  p.constraints = {[](const Vec& x) { return 0.025 + 0.02 * x[0]; }};
  p.objective_batch = [](const Mat& pts) {
    return Vec(pts.col(0) + pts.col(1));
  };
  p.constraints_batch = {[](const Mat& pts) {
    return Vec(0.025 + 0.02 * pts.col(0).array());
  }};
  p.f_star = 0.0;
  p.meta = {{"kind", "custom"}};

  RunConfig cfg;
  cfg.model.hyper = ModelConfig::Hyper::Fixed;
  cfg.model.kernel_f = KernelSpec::se(0.3);
  cfg.model.kernel_c = KernelSpec::se(0.3);
  cfg.n_initial = 6;
  cfg.n_iterations = 3;
  cfg.optimizer.n_candidates = 128;
  cfg.optimizer.refine_steps = 8;

  cfg.lambda = 0.0;
  const RegretTrace strict = run_trial(p, cfg, 0);
  CHECK(!strict.first_feasible_iteration.has_value());
  for (const auto& rec : strict.iters) CHECK(!rec.f_plus.has_value());

  cfg.lambda = 0.1;
  const RegretTrace tolerant = run_trial(p, cfg, 0);
  REQUIRE(tolerant.first_feasible_iteration.has_value());
  CHECK(*tolerant.first_feasible_iteration == 0);
  CHECK(tolerant.incumbent_after_init.has_value());
  for (const auto& rec : tolerant.iters) {
    CHECK(rec.f_plus.has_value());
    CHECK(!rec.feasible);  // strict feasibility still recorded raw
  }
}

TEST_CASE("sample-complexity direction: hitting times grow as eps halves") {
  const Problem p2 = make_benchmark(2);
  RunConfig cfg = small_p2_config("unused");
  cfg.n_iterations = 12;
  const RegretTrace trace = run_trial(p2, cfg, 0);
  const RegretSeries series = simple_regret(trace, 0.6);
  REQUIRE(!series.no_incumbent);
  auto hitting_time = [&](double eps) {
    for (const auto& [t, r] : series.points) {
      if (r <= eps) return t;
    }
    return 1 << 20;  // never reached within budget
  };
  const double eps0 = series.points.front().second;
  int prev = 0;
  for (double eps = eps0; eps >= eps0 / 16.0; eps /= 2.0) {
    const int ht = hitting_time(eps);
    CHECK(ht >= prev);
    prev = ht;
  }
}

TEST_CASE("noisy posterior dominates at every logged next-point") {
  const Problem p2 = make_benchmark(2);
  RunConfig cfg = small_p2_config("unused");
  cfg.n_iterations = 6;
  cfg.model.hyper = ModelConfig::Hyper::Fixed;
  cfg.model.kernel_f = KernelSpec::se(0.2);
  cfg.model.kernel_c = KernelSpec::se(0.2);
  const RegretTrace trace = run_trial(p2, cfg, 0);
  REQUIRE(!trace.failed);

  // rebuild the objective model at each iteration prefix and compare the
  // logged noise-free sd against noisy refits at the same next-point
  const int n_init = trace.n_initial;
  const int d = 2;
  Mat X(n_init + static_cast<int>(trace.iters.size()), d);
  Vec y(X.rows());
  int count = 0;
  for (const auto& rec : trace.initial) {
    X.row(count) = rec.x.transpose();
    y[count++] = rec.f;
  }
  for (const auto& rec : trace.iters) {
    ObservationSet data{X.topRows(count), y.head(count)};
    for (double noise : {1e-4, 1e-2, 1.0}) {
      const PosteriorModel noisy =
          PosteriorModel::fit(KernelSpec::se(0.2), data, noise);
      CHECK(rec.sigma_f_at_next <= noisy.predict(rec.x).sigma + 1e-10);
    }
    X.row(count) = rec.x.transpose();
    y[count++] = rec.f;
  }
}

TEST_CASE("run_experiment writes deterministic artifacts") {
  const fs::path dir = fs::temp_directory_path() / "cei_test_run";
  fs::remove_all(dir);
  RunConfig cfg = small_p2_config(dir.string());

  const RunResult result = run_experiment(cfg);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "trials" / "trial_0.jsonl"));
  CHECK(fs::exists(dir / "trials" / "trial_1.jsonl"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "bounds.jsonl"));
  CHECK(fs::exists(dir / "plots" / "regret_linear.svg"));

  REQUIRE(result.summary.size() == 5);
  for (const auto& row : result.summary) {
    if (row.n > 0) {
      CHECK(row.q25 <= row.q50);
      CHECK(row.q50 <= row.q75);
    }
  }

  auto slurp = [](const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string csv1 = slurp(dir / "summary.csv");
  CHECK(csv1.rfind("t,q25,q50,q75,n\n", 0) == 0);

  // re-run: byte-identical summary and identical chosen candidates
  const RunResult again = run_experiment(cfg);
  CHECK(slurp(dir / "summary.csv") == csv1);
  for (int i = 0; i < cfg.n_trials; ++i) {
    REQUIRE(result.trials[i].iters.size() == again.trials[i].iters.size());
    for (std::size_t t = 0; t < result.trials[i].iters.size(); ++t) {
      CHECK(result.trials[i].iters[t].candidate_index ==
            again.trials[i].iters[t].candidate_index);
    }
  }

  // single-trial quantiles collapse onto that trial's regret series
  RunConfig single = cfg;
  single.n_trials = 1;
  single.output_dir = (dir / "single").string();
  const RunResult one = run_experiment(single);
  for (const auto& row : one.summary) {
    if (row.n == 1) {
      const auto& rec = one.trials[0].iters[row.t - 1];
      REQUIRE(rec.regret.has_value());
      CHECK(row.q25 == *rec.regret);
      CHECK(row.q50 == *rec.regret);
      CHECK(row.q75 == *rec.regret);
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("config json: round trip and unknown-key rejection") {
  RunConfig cfg = small_p2_config("somewhere");
  cfg.lambda = 0.05;
  cfg.delta = 0.2;
  cfg.model.hyper = ModelConfig::Hyper::Mle;
  const nlohmann::json j = cfg.to_json();
  const RunConfig back = RunConfig::from_json(j);
  CHECK(back.problem.id == 2);
  CHECK(back.n_trials == cfg.n_trials);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.model.hyper == ModelConfig::Hyper::Mle);
  CHECK(back.output_dir == "somewhere");

  nlohmann::json bad = j;
  bad["unexpected"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(bad), InvalidInput);
  nlohmann::json bad2 = j;
  bad2["problem"]["bogus"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(bad2), InvalidInput);
  nlohmann::json bad3 = j;
  bad3["optimizer"]["n_threads"] = 4;
  CHECK_THROWS_AS(RunConfig::from_json(bad3), InvalidInput);

  // synthetic problem block round-trips its kernels
  RunConfig synth;
  synth.problem.kind = "rkhs";
  synth.problem.dim = 2;
  synth.problem.kernel_f = KernelSpec::matern(2.5, 0.2);
  synth.problem.kernel_c = KernelSpec::se(0.2);
  const RunConfig synth_back = RunConfig::from_json(synth.to_json());
  CHECK(synth_back.problem.kernel_f->family == KernelFamily::Matern);
  CHECK(synth_back.problem.kernel_c->family ==
        KernelFamily::SquaredExponential);
}

TEST_CASE("trace jsonl round trip") {
  const Problem p2 = make_benchmark(2);
  RunConfig cfg = small_p2_config("unused");
  const RegretTrace trace = run_trial(p2, cfg, 1);

  const fs::path path = fs::temp_directory_path() / "cei_trace_rt.jsonl";
  write_trace_jsonl(trace, path.string());
  const RegretTrace back = read_trace_jsonl(path.string());
  fs::remove(path);

  CHECK(back.trial_index == trace.trial_index);
  CHECK(back.seed == trace.seed);
  CHECK(back.n_initial == trace.n_initial);
  CHECK(back.initial.size() == trace.initial.size());
  REQUIRE(back.iters.size() == trace.iters.size());
  CHECK(*back.f_star == *trace.f_star);
  for (std::size_t i = 0; i < trace.iters.size(); ++i) {
    const auto& a = trace.iters[i];
    const auto& b = back.iters[i];
    CHECK(a.t == b.t);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.f == b.f);
    CHECK(a.candidate_index == b.candidate_index);
    CHECK(a.sigma_f_at_next == b.sigma_f_at_next);
    CHECK(a.f_plus.has_value() == b.f_plus.has_value());
  }
}

TEST_CASE("summary csv round trip") {
  std::vector<SummaryRow> rows;
  for (int t = 1; t <= 4; ++t) {
    rows.push_back({t, 0.1 / t, 0.2 / t, 0.35 / t, 7});
  }
  const std::string csv = summary_to_csv(rows);
  const auto back = summary_from_csv(csv);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].q25 == rows[i].q25);
    CHECK(back[i].q50 == rows[i].q50);
    CHECK(back[i].q75 == rows[i].q75);
    CHECK(back[i].n == rows[i].n);
  }
}

TEST_CASE("svg plots") {
  // constant single-trial regret: a horizontal median line
  std::vector<SummaryRow> flat;
  for (int t = 1; t <= 10; ++t) flat.push_back({t, 1.0, 1.0, 1.0, 1});
  const std::string svg = emit_plot_svg(flat, PlotStyle::RegretLinear);
  CHECK(xml_well_formed(svg));
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("simple regret") != std::string::npos);

  // 1/t series on a log-log scale is a straight slope -1 line
  std::vector<SummaryRow> inv;
  for (int t = 1; t <= 50; ++t) {
    inv.push_back({t, 0.9 / t, 1.0 / t, 1.2 / t, 5});
  }
  const std::string loglog = emit_plot_svg(inv, PlotStyle::RegretLogLog);
  CHECK(xml_well_formed(loglog));
  {
    // the median polyline (stroke steelblue) must be collinear in pixels
    const std::size_t at = loglog.find("steelblue");
    REQUIRE(at != std::string::npos);
    const std::size_t pts_at = loglog.find("points=\"", at);
    REQUIRE(pts_at != std::string::npos);
    const std::size_t end = loglog.find('"', pts_at + 8);
    std::istringstream pts(loglog.substr(pts_at + 8, end - pts_at - 8));
    std::vector<std::pair<double, double>> xy;
    std::string tok;
    while (pts >> tok) {
      const auto comma = tok.find(',');
      xy.emplace_back(std::stod(tok.substr(0, comma)),
                      std::stod(tok.substr(comma + 1)));
    }
    REQUIRE(xy.size() == 50);
    const double slope = (xy.back().second - xy.front().second) /
                         (xy.back().first - xy.front().first);
    for (const auto& [x, y] : xy) {
      const double on_line = xy.front().second + slope * (x - xy.front().first);
      CHECK(std::abs(y - on_line) <= 0.01);
    }
  }

  // nonpositive medians are dropped with an annotation
  std::vector<SummaryRow> mixed = inv;
  mixed.push_back({51, 0.0, 0.0, 0.0, 5});
  const std::string annotated = emit_plot_svg(mixed, PlotStyle::RegretLogLog);
  CHECK(annotated.find("dropped 1 nonpositive") != std::string::npos);

  // all-zero medians cannot be drawn in log-log mode
  std::vector<SummaryRow> zeros;
  for (int t = 1; t <= 5; ++t) zeros.push_back({t, 0.0, 0.0, 0.0, 3});
  CHECK_THROWS_WITH_AS(emit_plot_svg(zeros, PlotStyle::RegretLogLog),
                       doctest::Contains("regret_linear"), InvalidInput);
}

TEST_CASE("cli: exit codes and artifacts") {
  auto run_cli = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "cei-bench");
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  };

  CHECK(run_cli({"definitely-not-a-command"}) != 0);
  CHECK(run_cli({}) != 0);

  const fs::path dir = fs::temp_directory_path() / "cei_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path grid_path = dir / "grid.csv";
  CHECK(run_cli({"export-grid", "--problem", "p1", "--resolution", "4",
                 "--out", grid_path.string()}) == 0);
  CHECK(fs::exists(grid_path));

  RunConfig cfg = small_p2_config((dir / "run").string());
  const fs::path cfg_path = dir / "config.json";
  {
    std::ofstream out(cfg_path);
    out << cfg.to_json().dump(2);
  }
  CHECK(run_cli({"run", "--config", cfg_path.string()}) == 0);
  CHECK(fs::exists(dir / "run" / "summary.csv"));

  CHECK(run_cli({"verify-bounds", "--run-dir", (dir / "run").string()}) == 0);
  CHECK(run_cli({"plot", "--run-dir", (dir / "run").string(), "--style",
                 "regret_loglog"}) == 0);
  CHECK(fs::exists(dir / "run" / "plots" / "regret_loglog.svg"));

  CHECK(run_cli({"run", "--config", (dir / "missing.json").string()}) == 1);

  // bench and synthetic front-ends, scaled down
  CHECK(run_cli({"bench", "--problem", "p2", "--trials", "1", "--iterations",
                 "2", "--n-initial", "6", "--n-candidates", "64", "--out",
                 (dir / "bench").string()}) == 0);
  CHECK(fs::exists(dir / "bench" / "summary.csv"));
  CHECK(run_cli({"synthetic", "--setting", "rkhs", "--kernel", "matern25",
                 "--dim", "2", "--trials", "1", "--iterations", "2",
                 "--n-candidates", "64", "--out",
                 (dir / "synth").string()}) == 0);
  CHECK(fs::exists(dir / "synth" / "bounds.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("verify-bounds flags tampered traces with exit code 2") {
  auto run_cli = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "cei-bench");
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  };
  const fs::path dir = fs::temp_directory_path() / "cei_verify_test";
  fs::remove_all(dir);

  RunConfig cfg;
  cfg.problem.kind = "rkhs";
  cfg.problem.dim = 2;
  cfg.problem.kernel_f = KernelSpec::se(0.2);
  cfg.problem.kernel_c = KernelSpec::se(0.2);
  cfg.n_trials = 1;
  cfg.n_iterations = 6;
  cfg.optimizer.n_candidates = 256;
  cfg.optimizer.refine_steps = 10;
  cfg.base_seed = 5;
  cfg.output_dir = dir.string();
  run_experiment(cfg);
  CHECK(run_cli({"verify-bounds", "--run-dir", dir.string()}) == 0);

  // push f_star far below anything reachable: every audited t violates.
  // The shift has to beat the bound's rhs, which is astronomically large
  // (c_tauB / Phi(-B_c) ~ 1e26 for typical generator norms).
  const fs::path trial = dir / "trials" / "trial_0.jsonl";
  RegretTrace trace = read_trace_jsonl(trial.string());
  REQUIRE(trace.f_star.has_value());
  trace.f_star = *trace.f_star - 1e60;
  for (auto& rec : trace.iters) {
    if (rec.f_plus) rec.regret = *rec.f_plus - *trace.f_star;
  }
  write_trace_jsonl(trace, trial.string());
  CHECK(run_cli({"verify-bounds", "--run-dir", dir.string()}) == 2);
  fs::remove_all(dir);
}
