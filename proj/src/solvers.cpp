#include "subzero/solvers.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "subzero/engine.hpp"
#include "subzero/pruning.hpp"

namespace subzero {
namespace {

long long ceil_positive(double x) { return std::max(1LL, static_cast<long long>(std::ceil(x))); }

void require_kind(const OracleHandle& oracle, OracleKind kind, const char* solver) {
  if (oracle.kind() != kind) {
    throw std::invalid_argument(std::string(solver) + ": expected a " + to_string(kind) + " oracle");
  }
}

}  // namespace

long long iterations_dp(int n, double radius, double lipschitz, double eps) {
  return ceil_positive(8.0 * n * (n + 1) * std::log(2.0 * radius * lipschitz / eps));
}

long long iterations_c(int n, double radius, double lipschitz, double eps) {
  return ceil_positive(8.0 * n * (n + 1) * std::log(radius * lipschitz / eps));
}

double comparator_kappa(int n) {
  const double nn = static_cast<double>(n);
  const double denom = 4.0 * nn - std::sqrt(2.0) * nn * std::sqrt((4.0 * nn * nn - 1.0) / (4.0 * nn * nn));
  return std::max(4.0 / denom, 1.0);
}

double comparator_step(int n, double eps, double lambda_max, double beta, double radius) {
  const double nn = static_cast<double>(n);
  return std::min(eps, std::sqrt(lambda_max)) /
         (comparator_kappa(n) * std::pow(nn, 2.5) * std::max(beta, 1.0) * std::max(radius, 1.0));
}

double value_step(int n, double eps, double lambda_max, double beta, double radius) {
  const double nn = static_cast<double>(n);
  const double r = std::sqrt(lambda_max);
  const double d = eps / (2.0 * (2.0 * nn + 1.0) * std::sqrt(nn) * beta * std::max(radius, r));
  return std::min(d, r / (2.0 * nn));
}

double query_bound_dp(int n, double radius, double lipschitz, double eps, long long k) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return nn * kk * std::ceil(2.0 * nn * std::log(2.0 * nn)) +
         kk * std::log2(radius * lipschitz * (kk + 1.0) / eps);
}

double query_bound_c(int n, long long k) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return 2.0 * nn * std::ceil(2.0 * nn * std::log(2.0 * std::sqrt(2.0) * nn) + nn) * kk + kk;
}

double query_bound_v(int n, long long k) { return (n + 1.0) * static_cast<double>(k); }

SolveResult optimize_dp(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg) {
  require_kind(oracle, OracleKind::DirectionalPreference, "optimize_dp");
  const int n = problem.dimension;
  const double eps = cfg.eps;
  EllipsoidEngine eng(problem, oracle, cfg, "dp");
  const long long k_max = cfg.max_iterations.value_or(iterations_dp(n, problem.radius, problem.lipschitz, eps));
  eng.trace().planned_iterations = k_max;
  const double theta = std::asin(1.0 / (2.0 * n));
  const double depth = 1.0 / (2.0 * n);

  std::vector<Vector> centers;
  std::string stop = "completed";
  long long k = 1;
  for (; k <= k_max; ++k) {
    eng.ensure_feasible(0.0);
    if (eng.radius() < eps / (2.0 * problem.lipschitz)) {
      stop = "small_ellipsoid";
      break;
    }
    const IsotropicTransform t = isotropic(eng.ellipsoid());
    centers.push_back(t.center);
    const PruneResult pr = pd_dp(oracle, t, theta);
    eng.record(k, "cut", pr.final_angle, false);
    eng.cut(k, t, pr.direction, depth);
  }
  eng.ensure_feasible(0.0);
  centers.push_back(eng.ellipsoid().center);
  eng.record(k, "center", std::nullopt, false);

  SolveResult out;
  out.point = compare_dp(centers, oracle, eps / 2.0);
  eng.record(k, "final", std::nullopt, false, &out.point);
  out.trace = eng.finish(stop);
  return out;
}

SolveResult optimize_c(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg) {
  require_kind(oracle, OracleKind::Comparator, "optimize_c");
  const int n = problem.dimension;
  const double eps = cfg.eps;
  const double beta = problem.smoothness;
  const double radius = problem.radius;
  EllipsoidEngine eng(problem, oracle, cfg, "comparator");
  const long long k_max = cfg.max_iterations.value_or(iterations_c(n, radius, problem.lipschitz, eps));
  eng.trace().planned_iterations = k_max;
  const double theta = std::asin(1.0 / (2.0 * std::sqrt(2.0) * n));
  const double depth = 1.0 / (2.0 * n);
  auto probe_radius = [&](const Ellipsoid& e) {
    const double lmax = e.lambda_max();
    return comparator_step(n, eps, lmax, beta, radius) / std::sqrt(lmax);
  };

  std::vector<Vector> centers;
  std::string stop = "completed";
  long long k = 1;
  for (; k <= k_max; ++k) {
    eng.ensure_feasible(probe_radius);
    if (eng.radius() < eps / problem.lipschitz) {
      stop = "small_ellipsoid";
      break;
    }
    const IsotropicTransform t = isotropic(eng.ellipsoid());
    centers.push_back(t.center);
    const double step = comparator_step(n, eps, t.scale * t.scale, beta, radius);
    const PruneResult pr = pd_c(oracle, t, theta, step);
    if (pr.degenerate) {
      // Every direction unknown: the gradient is below the step-size bound
      // and this center is already eps-optimal.
      eng.record(k, "exit", pr.final_angle, true);
      stop = "near_stationary";
      ++k;
      break;
    }
    eng.record(k, "cut", pr.final_angle, false);
    eng.cut(k, t, pr.direction, depth);
  }
  eng.ensure_feasible(0.0);
  centers.push_back(eng.ellipsoid().center);
  eng.record(k, "center", std::nullopt, false);

  std::deque<Vector> pool(centers.begin(), centers.end());
  while (pool.size() > 1) {
    Vector a = std::move(pool.front());
    pool.pop_front();
    Vector b = std::move(pool.front());
    pool.pop_front();
    pool.push_back(oracle.query_comparator(a, b) == -1 ? std::move(b) : std::move(a));
  }
  SolveResult out;
  out.point = pool.front();
  eng.record(k, "final", std::nullopt, false, &out.point);
  out.trace = eng.finish(stop);
  return out;
}

SolveResult optimize_v(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg) {
  require_kind(oracle, OracleKind::Value, "optimize_v");
  const int n = problem.dimension;
  const double nn = static_cast<double>(n);
  const double eps = cfg.eps;
  const double beta = problem.smoothness;
  const double radius = problem.radius;
  EllipsoidEngine eng(problem, oracle, cfg, "value");
  const long long k_max = cfg.max_iterations.value_or(iterations_dp(n, radius, problem.lipschitz, eps));
  eng.trace().planned_iterations = k_max;
  const double depth = 1.0 / (2.0 * nn);
  auto probe_radius = [&](const Ellipsoid& e) {
    const double lmax = e.lambda_max();
    return value_step(n, eps, lmax, beta, radius) / std::sqrt(lmax);
  };

  Vector best;
  double best_value = std::numeric_limits<double>::infinity();
  auto evaluate_center = [&](const Vector& x) {
    const double v = oracle.query_value(x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
    return v;
  };

  std::string stop = "completed";
  long long k = 1;
  for (; k <= k_max; ++k) {
    eng.ensure_feasible(probe_radius);
    if (eng.radius() < eps / problem.lipschitz) {
      stop = "small_ellipsoid";
      evaluate_center(eng.ellipsoid().center);
      eng.record(k, "center", std::nullopt, false);
      break;
    }
    const IsotropicTransform t = isotropic(eng.ellipsoid());
    const double d = value_step(n, eps, t.scale * t.scale, beta, radius);
    const double f0 = evaluate_center(t.center);
    Vector grad(n);
    for (int j = 0; j < n; ++j) {
      grad(j) = (oracle.query_value(t.inverse(d * Vector::Unit(n, j))) - f0) / d;
    }
    const double half_width = std::sqrt(nn) * beta * d / 2.0;
    const double norm = grad.norm();
    if (norm < 2.0 * nn * half_width) {
      eng.record(k, "exit", std::nullopt, false);
      stop = "near_stationary";
      break;
    }
    eng.record(k, "cut", std::asin(half_width / norm), false);
    eng.cut(k, t, grad, depth);
  }

  SolveResult out;
  out.point = best;
  eng.record(k, "final", std::nullopt, false, &out.point);
  out.trace = eng.finish(stop);
  return out;
}

}  // namespace subzero
