#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "cei/common.hpp"

namespace cei {

struct Box {
  Vec lower;
  Vec upper;

  void validate() const;
  int dim() const { return static_cast<int>(lower.size()); }
  Vec width() const { return upper - lower; }
  bool contains(const Vec& x, double slack = 0.0) const;
  Vec clamp(Vec x) const;

  static Box unit(int dim);
};

struct OptimizerConfig {
  int n_candidates = 0;  // 0 = auto: 4096 * dim, capped at 16384
  int n_refine_starts = 8;
  int refine_steps = 60;
  std::uint64_t seed = 0;

  void validate() const;
  int resolved_candidates(int dim) const;
};

// Acquisition surfaces are evaluated in bulk over the rows of a point set.
using BatchObjective = std::function<Vec(const Mat&)>;

struct MaximizeResult {
  Vec x;
  double value;
  long candidate_index;  // pool index of the start that won, for determinism
};

// Global maximization over a box: scrambled low-discrepancy candidate pool
// scored in bulk, top starts refined by coordinate-wise pattern search with
// geometric step decay, everything clamped to the box. Deterministic given
// the seed; ties break to the lowest candidate index. Candidates within the
// duplicate threshold of a row of `avoid` are perturbed by one refinement
// step before scoring. Non-finite objective values discard the candidate;
// if every candidate is discarded, throws DegenerateSurface.
MaximizeResult maximize(const BatchObjective& objective, const Box& box,
                        const OptimizerConfig& cfg,
                        const Mat* avoid = nullptr);

// Convenience wrapper for plain scalar objectives.
MaximizeResult maximize_scalar(const std::function<double(const Vec&)>& f,
                               const Box& box, const OptimizerConfig& cfg,
                               const Mat* avoid = nullptr);

// Scaled-coordinate duplicate test and the perturbation rule shared with the
// sampling loop: points within 1e-9 of a row of `existing` (L-inf, scaled by
// box width) are shifted by one initial refinement step (10% of box width),
// reflecting at the box boundary.
bool is_duplicate_of_any(const Vec& x, const Mat& existing, const Box& box);
Vec perturb_duplicate(Vec x, const Mat& existing, const Box& box);

inline constexpr double kDuplicateTol = 1e-9;

}  // namespace cei
