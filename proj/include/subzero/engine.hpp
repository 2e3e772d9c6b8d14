#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "subzero/solvers.hpp"

namespace subzero {

/// Shared ellipsoid iteration state: the current ellipsoid, separation-based
/// feasibility cuts, main-loop shallow cuts and trace recording.
class EllipsoidEngine {
 public:
  static constexpr int kMaxFeasibilityCuts = 10000;

  EllipsoidEngine(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg,
                  std::string solver);

  const Ellipsoid& ellipsoid() const { return ellipsoid_; }
  double radius() const { return std::sqrt(ellipsoid_.lambda_max()); }

  /// Cuts with domain separating halfspaces until E(rho^2 A, x0) lies in the
  /// domain, where rho is re-evaluated on the current ellipsoid. These cuts
  /// spend no queries. Returns the number of cuts.
  int ensure_feasible(const std::function<double(const Ellipsoid&)>& rho);
  int ensure_feasible(double rho) {
    return ensure_feasible([rho](const Ellipsoid&) { return rho; });
  }

  /// Shallow cut along g_iso (isotropic coordinates) at depth sin_theta.
  void cut(long long k, const IsotropicTransform& t, const Vector& g_iso, double sin_theta);

  /// Appends a record for the current center (or `point` when given).
  void record(long long k, const std::string& phase, std::optional<double> cone_angle, bool degenerate,
              const Vector* point = nullptr);

  RunTrace& trace() { return trace_; }
  RunTrace finish(const std::string& stop_reason);

 private:
  const ProblemInstance& problem_;
  OracleHandle& oracle_;
  const SolverConfig& cfg_;
  Ellipsoid ellipsoid_;
  RunTrace trace_;
  long long current_k_ = 0;
};

}  // namespace subzero
