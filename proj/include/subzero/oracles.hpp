#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "subzero/problems.hpp"

namespace subzero {

enum class OracleKind { DirectionalPreference, Comparator, Value, NoisyValue };

std::string to_string(OracleKind kind);

/// One oracle over a problem, with query counting, an optional budget and a
/// seeded Gaussian noise stream. Owned by a single run.
class OracleHandle {
 public:
  OracleHandle(OracleKind kind, ProblemPtr problem, double sigma = 0.0, std::uint64_t seed = 0,
               std::optional<long long> budget = std::nullopt);

  /// -1 if <grad f(x), y> < 0, else +1.
  int query_dp(const Vector& x, const Vector& y);
  /// -1 if f(x) >= f(y), else +1. Counts as one query.
  int query_comparator(const Vector& x, const Vector& y);
  /// f(x).
  double query_value(const Vector& x);
  /// f(x) + Z with Z ~ N(0, sigma^2).
  double query_noisy_value(const Vector& x);

  OracleKind kind() const { return kind_; }
  const ProblemInstance& problem() const { return *problem_; }
  const ProblemPtr& problem_ptr() const { return problem_; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  long long query_count() const { return count_; }
  std::optional<long long> budget() const { return budget_; }
  /// Queries left before the budget is hit (max long long without a budget).
  long long remaining() const;

 private:
  void admit(OracleKind expected, const char* op);
  void check_feasible(const Vector& x, const char* op) const;

  OracleKind kind_;
  ProblemPtr problem_;
  double sigma_;
  std::uint64_t seed_;
  std::optional<long long> budget_;
  long long count_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

/// Relative slack allowed on domain membership of oracle query points.
inline constexpr double kFeasibilityTol = 1e-12;

}  // namespace subzero
