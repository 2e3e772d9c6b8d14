#pragma once

#include <vector>

#include "subzero/oracles.hpp"
#include "subzero/problems.hpp"
#include "subzero/solvers.hpp"

namespace subzero {

struct RegretConfig {
  long long horizon = 0;  // T
  double delta = 0.1;
  double sigma = 0.0;
  bool record_trace = true;
};

/// Derived schedule constants of a regret run.
struct RegretSchedule {
  long long k = 0;  // outer rounds
  double delta_prime = 0.0;
  long long tau = 0;  // base repeats per sample point
  long long phase2_repeats = 0;
};

/// One inner level (k, i) of Phase 1. grad_error and true_grad_norm use the
/// analytic gradient and are verification data only.
struct RegretRound {
  long long k = 0;
  int i = 0;
  double d_i = 0.0;
  double delta_i = 0.0;
  long long tau_i = 0;
  double p_norm = 0.0;
  int case_taken = 2;  // 1: cut, 2: escalate
  bool complete = true;  // false when the budget ran out mid-level
  double grad_error = 0.0;  // |p - grad (f o T^{-1})(0)|
  double true_grad_norm = 0.0;
};

struct RegretResult {
  Vector point;
  RunTrace trace;  // one record per batch of identical queries
  std::vector<RegretRound> rounds;
  RegretSchedule schedule;
  long long cuts = 0;
  bool complete = false;  // Phase 1 and Phase 2 finished within T
  double cumulative_regret = 0.0;
};

RegretSchedule regret_schedule(int n, double radius, double lipschitz, const RegretConfig& cfg);

/// Three-phase noisy-value method. Stops after exactly min(T, queries
/// needed) oracle queries; Phase 3 spends the rest of the horizon on the
/// selected point. Throws ConfigError when T cannot cover one level at i = 0.
RegretResult regret_nv(const ProblemInstance& problem, OracleHandle& oracle, const RegretConfig& cfg);

/// K (R L tau + 5 T^{3/4} n^{-1/4} max(n R, 1)(1 + beta) tau^{1/4})
///   + (K + 1) ceil(32 sigma^2 sqrt(T) ln(2 (K + 1) / delta)) R L + T^{3/4}.
double theorem3_bound(const ProblemInstance& problem, const RegretConfig& cfg);

/// Instance over sqrt(beta) C with f'(sqrt(beta) x) = f(x): L' = L / sqrt(beta),
/// beta' = 1, R' = sqrt(beta) R, x*' = sqrt(beta) x*.
ProblemPtr beta_rescale(const ProblemInstance& problem);

}  // namespace subzero
