#include "cei/problems.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>

#include "cei/lowdisc.hpp"
#include "cei/rng.hpp"

namespace cei {

namespace {

constexpr int kRkhsBasisPoints = 100;
constexpr int kGpAnchorPoints = 1000;
constexpr double kGpAnchorJitter = 1e-10;
constexpr double kTwoPi = 6.2831853071795864769;

std::function<Vec(const Mat&)> rowwise(std::function<double(const Vec&)> f) {
  return [f = std::move(f)](const Mat& pts) {
    Vec out(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      out[i] = f(pts.row(i).transpose());
    }
    return out;
  };
}

void attach_rowwise_batches(Problem& p) {
  p.objective_batch = rowwise(p.objective);
  p.constraints_batch.clear();
  for (const auto& c : p.constraints) p.constraints_batch.push_back(rowwise(c));
}

Mat uniform_in_box(CounterRng& rng, int n, const Box& box) {
  const int d = box.dim();
  Mat pts(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      pts(i, j) = box.lower[j] + rng.next_double() * (box.upper[j] - box.lower[j]);
    }
  }
  return pts;
}

// Hartmann coefficient tables as printed in the problem definitions.
// Problem 3 stores A, P with dimensions down the rows and mixture terms
// across the columns; Problem 4 stores terms down the rows.
struct Hartmann4Tables {
  std::array<double, 4> e{1.0, 1.2, 3.0, 3.2};
  std::array<std::array<double, 4>, 4> p{{{0.131, 0.232, 0.234, 0.404},
                                          {0.169, 0.413, 0.145, 0.882},
                                          {0.556, 0.830, 0.352, 0.873},
                                          {0.012, 0.373, 0.288, 0.574}}};
  std::array<std::array<double, 4>, 4> a{{{10.0, 0.05, 3.0, 17.0},
                                          {3.0, 10.0, 3.5, 8.0},
                                          {17.0, 17.0, 1.7, 0.05},
                                          {3.5, 0.1, 10.0, 10.0}}};
};

struct Hartmann6Tables {
  std::array<double, 4> alpha{1.0, 1.2, 3.0, 3.2};
  std::array<std::array<double, 6>, 4> a{
      {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
       {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
       {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
       {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}}};
  std::array<std::array<double, 6>, 4> p{
      {{0.131, 0.170, 0.557, 0.012, 0.828, 0.587},
       {0.233, 0.414, 0.831, 0.374, 0.100, 0.999},
       {0.235, 0.145, 0.352, 0.288, 0.305, 0.665},
       {0.405, 0.883, 0.873, 0.574, 0.109, 0.038}}};
};

double hartmann4_mixture(const Vec& x) {
  static const Hartmann4Tables t;
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double expo = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double d = x[j] - t.p[j][i];
      expo += t.a[j][i] * d * d;
    }
    sum += t.e[i] * std::exp(-expo);
  }
  return sum;
}

double hartmann6(const Vec& x) {
  static const Hartmann6Tables t;
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double expo = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - t.p[i][j];
      expo += t.a[i][j] * d * d;
    }
    sum += t.alpha[i] * std::exp(-expo);
  }
  return -sum;
}

Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Box b;
  b.lower = Eigen::Map<const Vec>(std::data(lo), static_cast<int>(lo.size()));
  b.upper = Eigen::Map<const Vec>(std::data(hi), static_cast<int>(hi.size()));
  return b;
}

Box cube(int dim, double lo, double hi) {
  Box b;
  b.lower = Vec::Constant(dim, lo);
  b.upper = Vec::Constant(dim, hi);
  return b;
}

struct SearchedOptimum {
  bool found = false;
  Vec x;
  double f = std::numeric_limits<double>::infinity();
};

// Dense seeded search plus constrained pattern-search refinement over the
// feasible set. The candidate pool doubles as the reference grid that
// decides whether the feasible region is empty.
SearchedOptimum search_optimum(const Problem& p, std::uint64_t seed) {
  const int block = 65536;
  SearchedOptimum best;
  int remaining = kOptimumSearchCandidates;
  int skip = 0;
  while (remaining > 0) {
    const int n = std::min(block, remaining);
    Mat pts = halton_unit(n, p.dim, derive_stream(seed, "optimum-search"), skip);
    for (int i = 0; i < n; ++i) {
      pts.row(i) = (p.box.lower.array() +
                    pts.row(i).transpose().array() * p.box.width().array())
                       .transpose();
    }
    std::vector<Vec> cs;
    cs.reserve(p.constraints_batch.size());
    for (const auto& cb : p.constraints_batch) cs.push_back(cb(pts));
    const Vec fs = p.objective_batch(pts);
    for (int i = 0; i < n; ++i) {
      bool feasible = true;
      for (const Vec& c : cs) {
        if (c[i] > 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible && fs[i] < best.f) {
        best.found = true;
        best.f = fs[i];
        best.x = pts.row(i).transpose();
      }
    }
    remaining -= n;
    skip += n;
  }
  if (!best.found) return best;

  // Refinement: accept only feasible improving probes.
  Vec step = 0.1 * p.box.width();
  for (int s = 0; s < 60; ++s) {
    for (int d = 0; d < p.dim; ++d) {
      for (double sign : {1.0, -1.0}) {
        Vec probe = best.x;
        probe[d] = std::clamp(probe[d] + sign * step[d], p.box.lower[d],
                              p.box.upper[d]);
        bool feasible = true;
        for (const auto& c : p.constraints) {
          if (c(probe) > 0.0) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        const double fv = p.objective(probe);
        if (fv < best.f) {
          best.f = fv;
          best.x = probe;
        }
      }
    }
    step *= 0.7;
  }
  return best;
}

void append_double(std::string& out, double v) {
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

}  // namespace

double RkhsSample::value(const Vec& x) const {
  Vec k(basis.rows());
  kernel_eval_batch(spec, basis, x, k.data());
  return k.dot(weights);
}

Vec RkhsSample::value_batch(const Mat& pts) const {
  return kernel_cross(spec, pts, basis) * weights;
}

RkhsSample draw_rkhs_sample(const KernelSpec& spec, const Box& box,
                            std::uint64_t seed) {
  spec.validate();
  box.validate();
  RkhsSample s;
  s.spec = spec;
  CounterRng basis_rng(derive_stream(seed, "rkhs-basis"));
  s.basis = uniform_in_box(basis_rng, kRkhsBasisPoints, box);
  CounterRng weight_rng(derive_stream(seed, "rkhs-weights"));
  s.weights = weight_rng.normal_vec(kRkhsBasisPoints);
  const Mat K = kernel_gram(spec, s.basis);
  s.norm = std::sqrt(s.weights.dot(K * s.weights));
  return s;
}

Problem make_benchmark(int id, bool p5_literal_constraint) {
  require(id >= 1 && id <= 5, "make_benchmark: id must be in 1..5");
  Problem p;
  p.meta = {{"kind", "benchmark"}, {"id", id}};
  switch (id) {
    case 1: {
      p.name = "p1";
      p.dim = 2;
      p.box = cube(2, 0.0, 6.0);
      p.objective = [](const Vec& x) { return std::sin(x[0]) + x[1]; };
      p.constraints = {[](const Vec& x) {
        return std::sin(x[0]) * std::sin(x[1]) + 0.95;
      }};
      p.f_star = 0.25;
      break;
    }
    case 2: {
      p.name = "p2";
      p.dim = 2;
      p.box = cube(2, 0.0, 1.0);
      p.objective = [](const Vec& x) { return x[0] + x[1]; };
      p.constraints = {
          [](const Vec& x) {
            return -0.5 * std::sin(kTwoPi * (x[0] * x[0] - 2.0 * x[1])) -
                   x[0] - 2.0 * x[1] + 1.5;
          },
          [](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - 1.5; }};
      p.f_star = 0.6;
      break;
    }
    case 3: {
      p.name = "p3";
      p.dim = 4;
      p.box = cube(4, 0.0, 1.0);
      p.objective = [](const Vec& x) { return x.sum(); };
      p.constraints = {[](const Vec& x) { return 1.1 - hartmann4_mixture(x); }};
      p.f_star = 0.0;
      break;
    }
    case 4: {
      p.name = "p4";
      p.dim = 6;
      p.box = cube(6, 0.0, 1.0);
      p.objective = [](const Vec& x) { return hartmann6(x); };
      p.constraints = {
          [](const Vec& x) { return x[0] + x[1] + x[2] + x[3] - 3.0; }};
      p.f_star = -3.32;
      break;
    }
    case 5: {
      p.name = "p5";
      p.dim = 2;
      p.box = make_box({-5.0, 0.0}, {10.0, 15.0});
      p.objective = [](const Vec& x) {
        const double a = x[1] - x[0] * x[0];
        const double b = 1.0 - x[0];
        return 100.0 * a * a + b * b;
      };
      if (p5_literal_constraint) {
        p.constraints = {[](const Vec& x) {
          return std::sqrt(x[0] * x[0] + x[0] * x[0]) - 4.0;
        }};
      } else {
        p.constraints = {[](const Vec& x) {
          return std::sqrt(x[0] * x[0] + x[1] * x[1]) - 4.0;
        }};
      }
      p.constraints.push_back(
          [](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - 1.5; });
      p.f_star = 0.0;
      p.meta["p5_literal_constraint"] = p5_literal_constraint;
      break;
    }
  }
  p.meta["dim"] = p.dim;
  attach_rowwise_batches(p);
  return p;
}

Problem sample_rkhs_problem(const KernelSpec& spec_f, const KernelSpec& spec_c,
                            int dim, std::uint64_t seed) {
  require(dim >= 1, "sample_rkhs_problem: dim must be >= 1");
  Problem p;
  p.dim = dim;
  p.box = Box::unit(dim);

  auto f_sample = std::make_shared<RkhsSample>(
      draw_rkhs_sample(spec_f, p.box, derive_stream(seed, "rkhs-f")));
  p.objective = [f_sample](const Vec& x) { return f_sample->value(x); };
  p.objective_batch = [f_sample](const Mat& pts) {
    return f_sample->value_batch(pts);
  };
  p.rkhs_norm_f = f_sample->norm;

  for (std::uint64_t retry = 0; retry <= 10; ++retry) {
    auto c_sample = std::make_shared<RkhsSample>(draw_rkhs_sample(
        spec_c, p.box, derive_stream(seed, "rkhs-c", retry)));
    p.constraints = {[c_sample](const Vec& x) { return c_sample->value(x); }};
    p.constraints_batch = {
        [c_sample](const Mat& pts) { return c_sample->value_batch(pts); }};
    p.rkhs_norm_c = std::vector<double>{c_sample->norm};

    const SearchedOptimum opt = search_optimum(p, seed);
    if (opt.found) {
      p.f_star = opt.f;
      p.x_star = opt.x;
      p.optimum_estimated = true;
      p.name = "rkhs";
      p.meta = {{"kind", "rkhs"},
                {"seed", seed},
                {"dim", dim},
                {"kernel_f", kernel_to_json(spec_f)},
                {"kernel_c", kernel_to_json(spec_c)},
                {"constraint_retries", retry}};
      return p;
    }
  }
  throw UnsatisfiableProblem(
      "sample_rkhs_problem: no feasible point on the reference grid after 10 "
      "constraint resamples");
}

double GpSample::value(const Vec& x) const {
  Vec k(anchors.rows());
  kernel_eval_batch(spec, anchors, x, k.data());
  return k.dot(weights);
}

Vec GpSample::value_batch(const Mat& pts) const {
  return kernel_cross(spec, pts, anchors) * weights;
}

GpSample draw_gp_sample(const KernelSpec& spec, const Box& box,
                        std::uint64_t seed) {
  spec.validate();
  box.validate();
  GpSample s;
  s.spec = spec;
  CounterRng anchor_rng(derive_stream(seed, "gp-anchors"));
  s.anchors = uniform_in_box(anchor_rng, kGpAnchorPoints, box);
  Mat K = kernel_gram(spec, s.anchors);
  K.diagonal().array() += kGpAnchorJitter;
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success) {
    throw IllConditionedData("draw_gp_sample: anchor Gram not factorizable");
  }
  CounterRng value_rng(derive_stream(seed, "gp-values"));
  const Vec z = value_rng.normal_vec(kGpAnchorPoints);
  const Vec draw = Mat(llt.matrixL()) * z;
  s.weights = llt.solve(draw);
  // The interpolant is the function; store its own anchor values so the
  // recorded truth matches value() exactly. The jitter perturbs these from
  // the raw draw by O(jitter * ||weights||), well under 1e-6.
  K.diagonal().array() -= kGpAnchorJitter;
  s.values = K * s.weights;
  return s;
}

Problem sample_gp_problem(const KernelSpec& spec_f, const KernelSpec& spec_c,
                          int dim, std::uint64_t seed) {
  require(dim >= 1, "sample_gp_problem: dim must be >= 1");
  Problem p;
  p.dim = dim;
  p.box = Box::unit(dim);

  auto f_sample = std::make_shared<GpSample>(
      draw_gp_sample(spec_f, p.box, derive_stream(seed, "gp-f")));
  p.objective = [f_sample](const Vec& x) { return f_sample->value(x); };
  p.objective_batch = [f_sample](const Mat& pts) {
    return f_sample->value_batch(pts);
  };
  p.m_f_empirical = f_sample->values.cwiseAbs().maxCoeff();

  for (std::uint64_t retry = 0; retry <= 10; ++retry) {
    auto c_sample = std::make_shared<GpSample>(
        draw_gp_sample(spec_c, p.box, derive_stream(seed, "gp-c", retry)));
    p.constraints = {[c_sample](const Vec& x) { return c_sample->value(x); }};
    p.constraints_batch = {
        [c_sample](const Mat& pts) { return c_sample->value_batch(pts); }};
    p.m_c_empirical =
        std::vector<double>{c_sample->values.cwiseAbs().maxCoeff()};

    const SearchedOptimum opt = search_optimum(p, seed);
    if (opt.found) {
      p.f_star = opt.f;
      p.x_star = opt.x;
      p.optimum_estimated = true;
      p.name = "gp";
      p.meta = {{"kind", "gp"},
                {"seed", seed},
                {"dim", dim},
                {"kernel_f", kernel_to_json(spec_f)},
                {"kernel_c", kernel_to_json(spec_c)},
                {"constraint_retries", retry}};
      return p;
    }
  }
  throw UnsatisfiableProblem(
      "sample_gp_problem: no feasible point on the reference grid after 10 "
      "constraint resamples");
}

Evaluation evaluate(const Problem& problem, const Vec& x) {
  require(x.size() == problem.dim, "evaluate: dimension mismatch");
  require(x.allFinite(), "evaluate: non-finite coordinate");
  require(problem.box.contains(x), "evaluate: point outside the box");
  Evaluation e;
  e.f = problem.objective(x);
  e.c.reserve(problem.constraints.size());
  e.feasible = true;
  for (const auto& c : problem.constraints) {
    const double v = c(x);
    e.c.push_back(v);
    if (v > 0.0) e.feasible = false;
  }
  return e;
}

std::string export_grid_csv(const Problem& problem, int resolution) {
  if (problem.dim != 2) {
    throw UnsupportedDimension("export_grid_csv: problem must be 2-d");
  }
  require(resolution >= 2, "export_grid_csv: resolution must be >= 2");
  std::string out = "x1,x2,f";
  for (std::size_t i = 1; i <= problem.constraints.size(); ++i) {
    out += ",c" + std::to_string(i);
  }
  out += "\n";
  const Vec w = problem.box.width();
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      Vec x(2);
      x[0] = problem.box.lower[0] +
             w[0] * static_cast<double>(i) / (resolution - 1);
      x[1] = problem.box.lower[1] +
             w[1] * static_cast<double>(j) / (resolution - 1);
      const Evaluation e = evaluate(problem, x);
      append_double(out, x[0]);
      out += ',';
      append_double(out, x[1]);
      out += ',';
      append_double(out, e.f);
      for (double c : e.c) {
        out += ',';
        append_double(out, c);
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace cei
