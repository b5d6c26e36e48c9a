#pragma once

#include <vector>

#include "invfilter/core.hpp"

namespace invfilter {

// Projection of a nominal control onto an intersection of halfspaces and
// a bounding box: argmin |u - target|^2.
struct MinNormProblem {
  Vector target;
  std::vector<Halfspace> halfspaces;
  Box box;
};

enum class SolveStatus { optimal, infeasible };

struct SolveResult {
  SolveStatus status{SolveStatus::infeasible};
  Vector point;                        // valid when optimal
  std::vector<ConstraintId> active_set;  // constraints tight at the solution
  std::vector<double> multipliers;       // KKT multipliers, aligned with active_set
  double max_violation{0.0};
  std::vector<ConstraintId> certificate;  // mutually unsatisfiable subset
};

// Exact minimizer via a working-set search over the KKT system: every
// linearly independent subset of at most m constraints is a candidate
// active set, and the unique feasible candidate with nonnegative
// multipliers is the optimum. Deterministic given input order.
SolveResult solve_min_norm(const MinNormProblem& problem);

struct FeasibilityResult {
  bool feasible{false};
  Vector witness;
  std::vector<ConstraintId> certificate;
};

// Emptiness test: projects the box center onto the region.
FeasibilityResult feasible(const std::vector<Halfspace>& halfspaces,
                           const Box& box);

struct OracleResult {
  SolveStatus status{SolveStatus::infeasible};
  Vector point;
};

// Brute-force grid search over the box; test-side reference only.
// Exponential in the control dimension, so restricted to m <= 3.
OracleResult oracle_min_norm(const MinNormProblem& problem,
                             int grid_points_per_axis);

}  // namespace invfilter
