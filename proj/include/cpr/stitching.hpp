#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <vector>

#include "cpr/local_recovery.hpp"
#include "cpr/signal.hpp"
#include "cpr/tolerances.hpp"

namespace cpr {

// Shift-coefficient window (c_{j-L+1}, ..., c_j) from a monomial block.
Eigen::VectorXcd block_to_window(const LocalBlock& b, const LocalBasisMatrix& basis);

struct IntervalTransform {
  int j = 0;
  cplx phase{1.0, 0.0};
  bool conjugated = false;
  bool sigma_resolved = true;
};

struct AlignmentState {
  std::optional<int> anchor;
  bool real_fallback = false;
  std::vector<IntervalTransform> transforms;
  // Overlap indices k where neither conjugation choice could be separated;
  // the overlap window [k-L+2, k] is rank one in the R^2 sense.
  std::vector<int> unresolved_boundaries;

  nlohmann::json to_json() const;
};

struct StitchResult {
  CoeffSeq coeffs;
  AlignmentState alignment;
};

// Algorithm step 2: pick an anchor interval with an R^2-independent pair,
// then propagate phase and conjugation right and left by overlap matching.
// Windows must belong to consecutive intervals. When per-window residuals
// are supplied (one per window), each coefficient is taken from the
// lowest-residual aligned window covering it; otherwise each interval
// exposes its outermost new coefficient.
StitchResult stitch(const std::vector<std::pair<int, Eigen::VectorXcd>>& windows,
                    const Tolerances& tol = Tolerances{},
                    const std::vector<double>& residuals = {});

}  // namespace cpr
