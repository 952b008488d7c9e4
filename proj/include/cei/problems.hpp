#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cei/kernels.hpp"
#include "cei/optimizer.hpp"

namespace cei {

// A constrained minimization instance: minimize objective over the box
// subject to every constraint being <= 0.
struct Problem {
  std::string name;
  int dim = 0;
  Box box;
  std::function<double(const Vec&)> objective;
  std::vector<std::function<double(const Vec&)>> constraints;
  // Bulk row evaluation of the same functions (hot paths).
  std::function<Vec(const Mat&)> objective_batch;
  std::vector<std::function<Vec(const Mat&)>> constraints_batch;

  std::optional<double> f_star;
  std::optional<Vec> x_star;
  bool optimum_estimated = false;  // true when f*/x* came from seeded search

  std::optional<double> rkhs_norm_f;
  std::optional<std::vector<double>> rkhs_norm_c;
  std::optional<double> m_f_empirical;  // max |f| over GP anchor draws
  std::optional<std::vector<double>> m_c_empirical;

  nlohmann::json meta;  // identity for run metadata
};

// One draw from the RKHS of a kernel: f(x) = sum_i w_i k(x, b_i) over 100
// uniform basis points, weights standard normal. |f(x)| <= norm everywhere.
struct RkhsSample {
  KernelSpec spec;
  Mat basis;    // (100 x d)
  Vec weights;  // (100)
  double norm;  // sqrt(w^T K w)

  double value(const Vec& x) const;
  Vec value_batch(const Mat& pts) const;
};

RkhsSample draw_rkhs_sample(const KernelSpec& spec, const Box& box,
                            std::uint64_t seed);

// GP-prior draw: joint Gaussian values at 1000 uniform anchors (Cholesky of
// the anchor Gram with 1e-10 jitter), extended to the whole box by noise-free
// posterior-mean interpolation through the anchors.
struct GpSample {
  KernelSpec spec;
  Mat anchors;  // (1000 x d)
  Vec values;
  Vec weights;  // (K + jitter I)^-1 values

  double value(const Vec& x) const;
  Vec value_batch(const Mat& pts) const;
};

GpSample draw_gp_sample(const KernelSpec& spec, const Box& box,
                        std::uint64_t seed);

// The five appendix benchmarks. The printed optima are kept verbatim as
// f_star metadata. p5_literal_constraint switches Problem 5's first
// constraint to the printed sqrt(x1^2 + x1^2) - 4 form instead of the
// radius-4 disk (see README).
Problem make_benchmark(int id, bool p5_literal_constraint = false);

// Synthetic generators on [0, 1]^dim with estimated optima. Both regenerate
// identically from (specs, dim, seed). The constraint is resampled with an
// incremented sub-seed (at most 10 times) if its estimated feasible region
// is empty on the search grid.
Problem sample_rkhs_problem(const KernelSpec& spec_f, const KernelSpec& spec_c,
                            int dim, std::uint64_t seed);
Problem sample_gp_problem(const KernelSpec& spec_f, const KernelSpec& spec_c,
                          int dim, std::uint64_t seed);

struct Evaluation {
  double f;
  std::vector<double> c;
  bool feasible;  // all c_i <= 0
};

Evaluation evaluate(const Problem& problem, const Vec& x);

// CSV over a uniform resolution x resolution grid (2-d problems only):
// header x1,x2,f,c1,..., rows in row-major order (x1 outer, x2 inner).
std::string export_grid_csv(const Problem& problem, int resolution);

// Number of candidates used by the seeded optimum search for synthetics.
inline constexpr int kOptimumSearchCandidates = 1'000'000;

}  // namespace cei
