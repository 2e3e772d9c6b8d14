#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "subzero/geometry.hpp"

namespace subzero {

/// Feasible set: a Euclidean ball or an axis-aligned box.
struct Domain {
  enum class Kind { Ball, Box };

  Kind kind = Kind::Ball;
  Vector center;  // ball center, or box midpoint
  double radius = 0.0;  // ball only
  Vector lower;  // box only
  Vector upper;  // box only

  static Domain ball(Vector center, double radius);
  static Domain box(Vector lower, Vector upper);

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;

  /// Halfspace containing the domain that excludes x, or nullopt when x is inside.
  std::optional<Halfspace> separate(const Vector& x) const;

  /// Halfspace containing the domain that cuts into E(scale^2 A, x0), or
  /// nullopt when that ellipsoid lies inside the domain. scale = 0 tests the
  /// center only. Boxes return the face violated the most in units of
  /// sqrt(a^T A a); balls return the supporting plane at the farthest point.
  std::optional<Halfspace> separate(const Ellipsoid& e, double scale) const;

  /// R(C): ball radius, or half the diagonal of the box.
  double radius_bound() const;

  /// Uniform sample from the domain.
  Vector sample(std::mt19937_64& rng) const;
};

/// Ball -> E(r^2 I, c); box with half-widths a -> E(n diag(a^2), c).
Ellipsoid initial_ellipsoid(const Domain& d);

/// Smooth convex objective with exact constants and ground truth.
struct ProblemInstance {
  std::string kind;
  int dimension = 0;
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> gradient;
  Domain domain;
  double lipschitz = 0.0;
  double smoothness = 0.0;
  double radius = 0.0;
  double optimum_value = 0.0;
  Vector optimum_point;
  /// How optimum_value was obtained (analytic or reference solve).
  std::string provenance;

  double value(const Vector& x) const { return objective(x); }
  Vector grad(const Vector& x) const { return gradient(x); }
};

using ProblemPtr = std::shared_ptr<const ProblemInstance>;

/// f(x) = (x - x*)^T Q (x - x*) / 2 with beta = lambda_max(Q) and
/// L = lambda_max(Q) (R + |c - x*|) over the domain.
ProblemPtr make_quadratic(const Matrix& q, const Vector& x_star, const Domain& domain);

/// f(x) = t ln sum_i exp((<a_i, x> + b_i) / t), rows of `directions` are the a_i.
/// f* and x* come from a damped Newton reference solve to gradient norm 1e-12.
ProblemPtr make_logsumexp(const Matrix& directions, double temperature, const Domain& domain,
                          const Vector& offsets = Vector());

/// f(x) = sqrt(|x - x*|^2 + mu^2) with L = 1, beta = 1/mu, f* = mu.
ProblemPtr make_smoothed_norm(const Vector& x_star, double mu, const Domain& domain);

/// Throws AssumptionError unless E(eps I / L, x*) lies inside the domain.
void check_interior(const ProblemInstance& p, double eps);

/// Seeded members of the synthetic suite: "quadratic", "logsumexp", "smoothed_norm".
ProblemPtr make_suite_problem(const std::string& kind, int n, std::uint64_t seed);

/// Builds a problem from a JSON object with keys kind, n, seed, domain, parameters.
/// Missing optional parameters are drawn from the seeded suite generator.
ProblemPtr problem_from_json(const nlohmann::json& spec);

/// Outcome of the shared validation suite.
struct ValidationReport {
  int samples = 0;
  double max_gradient_norm = 0.0;
  double max_smoothness_ratio = 0.0;  // max |f(y)-f(x)-<g,y-x>| / (beta |y-x|^2 / 2)
  double max_fd_error = 0.0;  // max finite-difference error relative to max(1e-6, 1e-4 |g|)
  bool ok = true;
};

/// Checks Lipschitz, smoothness and finite-difference agreement on `samples` domain points.
ValidationReport validate_problem(const ProblemInstance& p, int samples, std::uint64_t seed);

}  // namespace subzero
