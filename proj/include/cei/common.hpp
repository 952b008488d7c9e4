#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace cei {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;  // point sets are (n_points x dim), column-major

// Thrown on malformed arguments: dimension mismatches, non-finite
// coordinates, out-of-range parameters.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky factorization failed even after the full jitter ladder.
struct IllConditionedData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every candidate of an acquisition surface evaluated non-finite.
struct DegenerateSurface : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CEI requested without a feasible incumbent.
struct NoIncumbent : std::logic_error {
  using std::logic_error::logic_error;
};

// Generated constraint admits no feasible point after all resample retries.
struct UnsatisfiableProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation defined only for a specific dimension (grid export is 2-d).
struct UnsupportedDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

}  // namespace cei
