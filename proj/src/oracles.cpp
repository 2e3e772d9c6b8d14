#include "subzero/oracles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace subzero {

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::DirectionalPreference: return "dp";
    case OracleKind::Comparator: return "comparator";
    case OracleKind::Value: return "value";
    case OracleKind::NoisyValue: return "noisy-value";
  }
  return "unknown";
}

OracleHandle::OracleHandle(OracleKind kind, ProblemPtr problem, double sigma, std::uint64_t seed,
                           std::optional<long long> budget)
    : kind_(kind), problem_(std::move(problem)), sigma_(sigma), seed_(seed), budget_(budget), rng_(seed) {
  if (!problem_) throw std::invalid_argument("OracleHandle: null problem");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw std::invalid_argument("OracleHandle: sigma must be >= 0");
  if (budget_ && *budget_ < 0) throw std::invalid_argument("OracleHandle: budget must be >= 0");
}

long long OracleHandle::remaining() const {
  if (!budget_) return std::numeric_limits<long long>::max();
  return *budget_ - count_;
}

void OracleHandle::admit(OracleKind expected, const char* op) {
  if (kind_ != expected) {
    throw std::logic_error(std::string(op) + " called on a " + to_string(kind_) + " oracle");
  }
  if (budget_ && count_ >= *budget_) {
    throw BudgetExhaustedError(std::string(op) + ": budget of " + std::to_string(*budget_) +
                               " queries exhausted");
  }
}

void OracleHandle::check_feasible(const Vector& x, const char* op) const {
  if (!problem_->domain.contains(x, kFeasibilityTol)) {
    std::ostringstream msg;
    msg << op << ": query point outside the domain: [" << x.transpose() << "]";
    throw InfeasibleQueryError(msg.str());
  }
}

int OracleHandle::query_dp(const Vector& x, const Vector& y) {
  admit(OracleKind::DirectionalPreference, "query_dp");
  check_feasible(x, "query_dp");
  if (y.size() != x.size() || !y.allFinite() || y.norm() == 0.0) {
    throw std::invalid_argument("query_dp: direction must be finite and nonzero");
  }
  ++count_;
  return problem_->grad(x).dot(y) < 0.0 ? -1 : 1;
}

int OracleHandle::query_comparator(const Vector& x, const Vector& y) {
  admit(OracleKind::Comparator, "query_comparator");
  check_feasible(x, "query_comparator");
  check_feasible(y, "query_comparator");
  ++count_;
  return problem_->value(x) >= problem_->value(y) ? -1 : 1;
}

double OracleHandle::query_value(const Vector& x) {
  admit(OracleKind::Value, "query_value");
  check_feasible(x, "query_value");
  ++count_;
  return problem_->value(x);
}

double OracleHandle::query_noisy_value(const Vector& x) {
  admit(OracleKind::NoisyValue, "query_noisy_value");
  check_feasible(x, "query_noisy_value");
  ++count_;
  const double z = noise_(rng_);
  return problem_->value(x) + sigma_ * z;
}

}  // namespace subzero
