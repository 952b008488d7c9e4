#include "cei/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cei/lowdisc.hpp"

namespace cei {

namespace {

constexpr double kInitialStepFraction = 0.1;
constexpr double kStepDecay = 0.7;

}  // namespace

void Box::validate() const {
  require(lower.size() >= 1, "Box: empty bounds");
  require(lower.size() == upper.size(), "Box: bound dimension mismatch");
  require(lower.allFinite() && upper.allFinite(), "Box: non-finite bound");
  for (int i = 0; i < dim(); ++i) {
    require(lower[i] < upper[i], "Box: lower must be < upper in every axis");
  }
}

bool Box::contains(const Vec& x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
  }
  return true;
}

Vec Box::clamp(Vec x) const {
  for (int i = 0; i < dim(); ++i) {
    x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
  }
  return x;
}

Box Box::unit(int dim) {
  Box b;
  b.lower = Vec::Zero(dim);
  b.upper = Vec::Ones(dim);
  return b;
}

void OptimizerConfig::validate() const {
  require(n_candidates >= 0, "OptimizerConfig: n_candidates must be >= 0");
  require(n_refine_starts >= 1 && refine_steps >= 1,
          "OptimizerConfig: refine counts must be positive");
  if (n_candidates > 0) {
    require(n_refine_starts <= n_candidates,
            "OptimizerConfig: n_refine_starts must be <= n_candidates");
  }
}

int OptimizerConfig::resolved_candidates(int dim) const {
  if (n_candidates > 0) return n_candidates;
  return std::min(4096 * dim, 16384);
}

bool is_duplicate_of_any(const Vec& x, const Mat& existing, const Box& box) {
  if (existing.rows() == 0) return false;
  const Vec w = box.width();
  for (Eigen::Index r = 0; r < existing.rows(); ++r) {
    double scaled = 0.0;
    for (int d = 0; d < box.dim(); ++d) {
      scaled = std::max(scaled, std::abs(x[d] - existing(r, d)) / w[d]);
    }
    if (scaled < kDuplicateTol) return true;
  }
  return false;
}

Vec perturb_duplicate(Vec x, const Mat& existing, const Box& box) {
  const Vec step = kInitialStepFraction * box.width();
  // Alternate the shift direction until the point clears every existing row;
  // one round suffices except in pathological layouts.
  for (int attempt = 0; attempt < 8 && is_duplicate_of_any(x, existing, box);
       ++attempt) {
    const double sign = (attempt % 2 == 0) ? 1.0 : -1.0;
    for (int d = 0; d < box.dim(); ++d) {
      double moved = x[d] + sign * step[d];
      if (moved > box.upper[d] || moved < box.lower[d]) {
        moved = x[d] - sign * step[d];
      }
      x[d] = moved;
    }
    x = box.clamp(x);
  }
  return x;
}

namespace {

struct RefineOutcome {
  Vec x;
  double value;
};

RefineOutcome refine(const BatchObjective& objective, const Box& box,
                     int refine_steps, Vec x, double value) {
  const int d = box.dim();
  Vec step = kInitialStepFraction * box.width();
  Mat probes(2 * d, d);
  for (int s = 0; s < refine_steps; ++s) {
    for (int i = 0; i < d; ++i) {
      Vec plus = x, minus = x;
      plus[i] = std::min(x[i] + step[i], box.upper[i]);
      minus[i] = std::max(x[i] - step[i], box.lower[i]);
      probes.row(2 * i) = plus.transpose();
      probes.row(2 * i + 1) = minus.transpose();
    }
    const Vec scores = objective(probes);
    int best = -1;
    double best_score = value;
    for (int i = 0; i < 2 * d; ++i) {
      if (std::isfinite(scores[i]) && scores[i] > best_score) {
        best_score = scores[i];
        best = i;
      }
    }
    if (best >= 0) {
      x = probes.row(best).transpose();
      value = best_score;
    }
    step *= kStepDecay;
  }
  return {std::move(x), value};
}

}  // namespace

MaximizeResult maximize(const BatchObjective& objective, const Box& box,
                        const OptimizerConfig& cfg, const Mat* avoid) {
  box.validate();
  cfg.validate();
  const int d = box.dim();
  const int n = cfg.resolved_candidates(d);
  require(cfg.n_refine_starts <= n,
          "maximize: n_refine_starts exceeds candidate pool");

  Mat pool = halton_unit(n, d, cfg.seed);
  const Vec w = box.width();
  for (int j = 0; j < d; ++j) {
    pool.col(j) = (box.lower[j] + w[j] * pool.col(j).array()).matrix();
  }
  if (avoid != nullptr && avoid->rows() > 0) {
    for (int i = 0; i < n; ++i) {
      Vec x = pool.row(i).transpose();
      if (is_duplicate_of_any(x, *avoid, box)) {
        pool.row(i) = perturb_duplicate(std::move(x), *avoid, box).transpose();
      }
    }
  }

  Vec scores = objective(pool);
  require(scores.size() == n, "maximize: objective returned wrong batch size");
  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(scores[i])) order.push_back(i);
  }
  if (order.empty()) {
    throw DegenerateSurface("maximize: objective non-finite at every candidate");
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  const int n_starts = std::min<int>(cfg.n_refine_starts,
                                     static_cast<int>(order.size()));
  MaximizeResult best;
  best.value = -std::numeric_limits<double>::infinity();
  best.candidate_index = -1;
  for (int s = 0; s < n_starts; ++s) {
    const int idx = order[s];
    RefineOutcome out = refine(objective, box, cfg.refine_steps,
                               pool.row(idx).transpose(), scores[idx]);
    if (out.value > best.value ||
        (out.value == best.value && idx < best.candidate_index)) {
      best.x = std::move(out.x);
      best.value = out.value;
      best.candidate_index = idx;
    }
  }
  return best;
}

MaximizeResult maximize_scalar(const std::function<double(const Vec&)>& f,
                               const Box& box, const OptimizerConfig& cfg,
                               const Mat* avoid) {
  BatchObjective batch = [&f](const Mat& pts) {
    Vec out(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      out[i] = f(pts.row(i).transpose());
    }
    return out;
  };
  return maximize(batch, box, cfg, avoid);
}

}  // namespace cei
