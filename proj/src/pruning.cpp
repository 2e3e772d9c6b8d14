#include "subzero/pruning.hpp"

#include <cmath>
#include <deque>
#include <numbers>

namespace subzero {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

void require_theta(double theta, const char* op) {
  if (!(theta > 0.0 && theta < kHalfPi)) {
    throw std::invalid_argument(std::string(op) + ": theta must lie in (0, pi/2)");
  }
}

}  // namespace

int pd_c_iteration_cap(int n) {
  const double nn = static_cast<double>(n);
  return static_cast<int>(std::ceil(2.0 * nn * std::log(2.0 * std::sqrt(2.0) * nn) + nn));
}

PruneResult pd_dp(OracleHandle& oracle, const IsotropicTransform& transform, double theta) {
  require_theta(theta, "pd_dp");
  const int n = static_cast<int>(transform.center.size());
  if (n < 2) throw std::invalid_argument("pd_dp: dimension must be >= 2");
  const long long start = oracle.query_count();
  // Safety net only; the shrink factor reaches theta well before this.
  const int cap = 4 * static_cast<int>(std::ceil(2.0 * n * std::log(kHalfPi / theta))) + 10;

  PruneResult res;
  Vector p = Vector::Unit(n, 0);
  double gamma = kHalfPi;
  res.history.emplace_back(p, gamma);
  const Vector& x = transform.center;
  while (gamma > theta && res.iterations < cap) {
    const std::vector<Vector> basis = orthonormal_completion({}, p);
    std::vector<int> signs(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      signs[i] = oracle.query_dp(x, transform.to_original_direction(basis[i]));
    }
    const Cone cone = cone_prune_geometry(gamma, signs, basis);
    p = cone.direction;
    gamma = cone.semi_vertical_angle;
    res.history.push_back(cone);
    ++res.iterations;
  }
  res.direction = p;
  res.final_angle = gamma;
  res.converged = gamma <= theta;
  res.queries = oracle.query_count() - start;
  return res;
}

std::optional<int> fdd_c(OracleHandle& oracle, const IsotropicTransform& transform, const Vector& d, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("fdd_c: step must be > 0");
  const Vector& x = transform.center;
  const Vector v = t * transform.to_original_direction(d);
  const Vector left = x - v;
  const Vector right = x + v;
  const int c_left = oracle.query_comparator(left, x);
  const int c_right = oracle.query_comparator(x, right);
  if (c_left == 1 && c_right == 1) return 1;
  if (c_left == -1 && c_right == -1) return -1;
  return std::nullopt;
}

PruneResult pd_c(OracleHandle& oracle, const IsotropicTransform& transform, double theta, double t) {
  require_theta(theta, "pd_c");
  const int n = static_cast<int>(transform.center.size());
  if (n < 2) throw std::invalid_argument("pd_c: dimension must be >= 2");
  const long long start = oracle.query_count();
  const int cap = pd_c_iteration_cap(n);

  PruneResult res;
  Vector p = Vector::Unit(n, 0);
  double gamma = kHalfPi;
  std::vector<Vector>& unknown = res.unknown_directions;
  res.history.emplace_back(p, gamma);
  while (gamma > theta && static_cast<int>(unknown.size()) < n && res.iterations < cap) {
    const std::vector<Vector> basis = orthonormal_completion(unknown, p);
    for (const auto& u : unknown) fdd_c(oracle, transform, u, t);
    std::vector<std::optional<int>> answers(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) answers[i] = fdd_c(oracle, transform, basis[i], t);
    ++res.iterations;

    std::size_t first_unknown = basis.size();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (!answers[i]) {
        first_unknown = i;
        break;
      }
    }
    if (first_unknown < basis.size()) {
      unknown.push_back(basis[first_unknown]);
      if (first_unknown == 0 && basis.size() > 1) {
        p = basis[1];
        gamma = kHalfPi;
      }
    } else if (basis.size() == 1) {
      p = *answers[0] * p;
      gamma = 0.0;
    } else {
      std::vector<int> signs(basis.size());
      for (std::size_t i = 0; i < basis.size(); ++i) signs[i] = *answers[i];
      const Cone cone = cone_prune_geometry(gamma, signs, basis);
      p = cone.direction;
      gamma = cone.semi_vertical_angle;
    }
    res.history.emplace_back(p, gamma);
  }
  res.degenerate = static_cast<int>(unknown.size()) == n;
  res.direction = res.degenerate ? Vector::Unit(n, 0) : p;
  res.final_angle = gamma;
  res.converged = !res.degenerate && gamma <= theta;
  res.queries = oracle.query_count() - start;
  return res;
}

Vector compare_dp(std::span<const Vector> points, OracleHandle& oracle, double eps) {
  if (points.empty()) throw std::invalid_argument("compare_dp: empty point set");
  if (!(eps > 0.0)) throw std::invalid_argument("compare_dp: eps must be > 0");
  const double m = static_cast<double>(points.size());
  const double stop = 2.0 * eps / (oracle.problem().lipschitz * m);
  std::deque<Vector> pool(points.begin(), points.end());
  while (pool.size() > 1) {
    Vector left = std::move(pool.front());
    pool.pop_front();
    Vector right = std::move(pool.front());
    pool.pop_front();
    while ((right - left).norm() > stop) {
      const Vector mid = 0.5 * (left + right);
      if (oracle.query_dp(mid, 0.5 * (right - left)) == -1) {
        left = mid;
      } else {
        right = mid;
      }
    }
    pool.push_back(0.5 * (left + right));
  }
  return pool.front();
}

}  // namespace subzero
