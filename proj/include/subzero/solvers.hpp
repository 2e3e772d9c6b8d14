#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subzero/geometry.hpp"
#include "subzero/oracles.hpp"
#include "subzero/problems.hpp"

namespace subzero {

/// One row of a run trace. Ground-truth columns (f_center and the regret
/// fields) are for verification and never feed back into the algorithms.
struct IterationRecord {
  long long k = 0;
  std::string phase;
  Vector center;
  double f_center = 0.0;
  double log_volume = 0.0;
  long long queries_cumulative = 0;
  std::optional<double> cone_angle;
  bool degenerate = false;
  std::optional<double> instantaneous_regret;
  std::optional<double> cumulative_regret;
};

struct RunTrace {
  std::string solver;
  std::vector<IterationRecord> records;
  long long iterations = 0;  // main-loop cuts performed
  long long planned_iterations = 0;  // K
  long long feasibility_cuts = 0;
  long long total_queries = 0;
  std::string stop_reason;  // "completed", "small_ellipsoid", "near_stationary", ...
  double optimum_value = 0.0;
};

/// Passed to SolverConfig::observer after every main-loop cut.
struct CutEvent {
  long long k = 0;
  const Ellipsoid* before = nullptr;
  const IsotropicTransform* transform = nullptr;
  Vector direction;  // isotropic coordinates
  double sin_theta = 0.0;
  const Ellipsoid* after = nullptr;
};

struct SolverConfig {
  double eps = 1e-2;
  std::optional<long long> max_iterations;
  bool record_trace = true;
  std::function<void(const CutEvent&)> observer;
};

struct SolveResult {
  Vector point;
  RunTrace trace;
};

/// Ellipsoid method with directional-preference queries and a final
/// bisection tournament over the centers.
SolveResult optimize_dp(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg);

/// Ellipsoid method with comparator queries and a final single-elimination
/// tournament over the centers.
SolveResult optimize_c(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg);

/// Ellipsoid method with forward-difference gradients from exact values.
SolveResult optimize_v(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg);

/// ceil(8 n (n+1) ln(2 R L / eps)).
long long iterations_dp(int n, double radius, double lipschitz, double eps);
/// ceil(8 n (n+1) ln(R L / eps)).
long long iterations_c(int n, double radius, double lipschitz, double eps);
/// max(4 / (4n - sqrt(2) n sqrt((4n^2 - 1) / (4n^2))), 1).
double comparator_kappa(int n);
/// min(eps, sqrt(lambda_max)) / (kappa n^{5/2} max(beta, 1) max(R, 1)).
double comparator_step(int n, double eps, double lambda_max, double beta, double radius);
/// Sampling distance of optimize_v for an ellipsoid with the given lambda_max.
double value_step(int n, double eps, double lambda_max, double beta, double radius);

/// n K ceil(2n ln 2n) + K log2(R L (K+1) / eps).
double query_bound_dp(int n, double radius, double lipschitz, double eps, long long k);
/// 2n ceil(2n ln(2 sqrt(2) n) + n) K + K.
double query_bound_c(int n, long long k);
/// (n + 1) K.
double query_bound_v(int n, long long k);

}  // namespace subzero
