#pragma once

#include <optional>
#include <span>
#include <vector>

#include "subzero/geometry.hpp"
#include "subzero/oracles.hpp"

namespace subzero {

/// Outcome of a cone-pruning run at one center, in isotropic coordinates.
struct PruneResult {
  Vector direction;
  double final_angle = 0.0;
  std::vector<Vector> unknown_directions;
  int iterations = 0;
  /// Every direction became unknown; direction is e_1.
  bool degenerate = false;
  /// The angle reached the target (false when the iteration cap stopped the run).
  bool converged = false;
  long long queries = 0;
  /// Cone after each iteration (starting cone first), for invariant checks.
  std::vector<Cone> history;
};

/// Shrinks F(e_1, pi/2) around grad (f o T^{-1})(0) with directional-preference
/// queries at the transform center along A^{1/2} d_i / scale, n per iteration,
/// until the angle is at most theta.
PruneResult pd_dp(OracleHandle& oracle, const IsotropicTransform& transform, double theta);

/// Sign of <grad (f o T^{-1})(0), d> from two comparisons at T^{-1}(-t d),
/// T^{-1}(0), T^{-1}(t d): +1 for strictly increasing values, -1 for
/// non-increasing values, nullopt otherwise.
std::optional<int> fdd_c(OracleHandle& oracle, const IsotropicTransform& transform, const Vector& d, double t);

/// Comparator version of pd_dp. Directions whose sign fdd_c cannot resolve
/// are moved to the unknown set one at a time and pruning continues in the
/// orthogonal complement. Every basis direction is probed each iteration
/// (2n comparisons). Stops when the angle is at most theta, when all n
/// directions are unknown, or after ceil(2n ln(2 sqrt(2) n) + n) iterations.
PruneResult pd_c(OracleHandle& oracle, const IsotropicTransform& transform, double theta, double t);

/// Bisection tournament over `points` with directional-preference queries.
/// The result is within eps of the best input value.
Vector compare_dp(std::span<const Vector> points, OracleHandle& oracle, double eps);

/// Iteration cap used by pd_c.
int pd_c_iteration_cap(int n);

}  // namespace subzero
