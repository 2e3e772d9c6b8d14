#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "subzero/pruning.hpp"

using namespace subzero;

namespace {

ProblemPtr half_norm_squared(int n, double radius = 3.0) {
  return make_quadratic(Matrix::Identity(n, n), Vector::Zero(n), Domain::ball(Vector::Zero(n), radius));
}

IsotropicTransform unit_at(const Vector& c) {
  return isotropic(Ellipsoid(Matrix::Identity(c.size(), c.size()), c));
}

Matrix random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Matrix m = Matrix::NullaryExpr(n, n, [&] { return g(rng); });
  return m * m.transpose() + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("pd_dp finds the gradient direction") {
  OracleHandle o(OracleKind::DirectionalPreference, half_norm_squared(2));
  const double theta = std::asin(0.25);
  const PruneResult r = pd_dp(o, unit_at(Vector::Unit(2, 0)), theta);
  CHECK(r.converged);
  CHECK(r.final_angle <= theta);
  CHECK(angle_between(r.direction, Vector::Unit(2, 0)) <= theta + 1e-12);
  CHECK(r.queries == 2 * r.iterations);
}

TEST_CASE("pd_dp cones always contain the gradient") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 6;
    const Matrix q = random_spd(n, rng);
    const ProblemPtr p = make_quadratic(q, Vector::Zero(n), Domain::ball(Vector::Zero(n), 10.0));
    OracleHandle o(OracleKind::DirectionalPreference, p);
    const Ellipsoid e(random_spd(n, rng), p->domain.sample(rng) * 0.1);
    const IsotropicTransform t = isotropic(e);
    const double theta = std::asin(1.0 / (2.0 * n));
    const PruneResult r = pd_dp(o, t, theta);
    // Gradient of f o T^{-1} at 0 is (A^{1/2}/scale)^T grad f(x0).
    const Vector g_iso = t.sqrt_shape * p->grad(t.center) / t.scale;
    CHECK(r.converged);
    // The starting cone carries no sign information yet.
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].contains(g_iso, 1e-9));
    CHECK(r.queries <= static_cast<long long>(n) * static_cast<long long>(std::ceil(2.0 * n * std::log(2.0 * n))));
  }
}

TEST_CASE("fdd_c orderings") {
  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 1.0;
  q(1, 1) = 1e-3;
  const ProblemPtr p = make_quadratic(q, Vector::Zero(2), Domain::ball(Vector::Zero(2), 3.0));
  OracleHandle o(OracleKind::Comparator, p);
  CHECK(fdd_c(o, unit_at(Vector::Unit(2, 0)), Vector::Unit(2, 0), 1e-3) == 1);
  CHECK(fdd_c(o, unit_at(-Vector::Unit(2, 0)), Vector::Unit(2, 0), 1e-3) == -1);
  CHECK_FALSE(fdd_c(o, unit_at(Vector::Zero(2)), Vector::Unit(2, 0), 1e-3).has_value());
  CHECK(o.query_count() == 6);
}

TEST_CASE("fdd_c unknown implies a small directional derivative") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(1e-4, 0.2);
  int unknown = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + trial % 4;
    const ProblemPtr p = make_quadratic(random_spd(n, rng), Vector::Zero(n), Domain::ball(Vector::Zero(n), 10.0));
    OracleHandle o(OracleKind::Comparator, p);
    const IsotropicTransform t = isotropic(Ellipsoid(random_spd(n, rng), 0.05 * Vector::NullaryExpr(n, [&] {
                                                       return g(rng);
                                                     })));
    Vector d = Vector::NullaryExpr(n, [&] { return g(rng); });
    d.normalize();
    const double step = u(rng);
    const auto s = fdd_c(o, t, d, step);
    const Vector v = t.to_original_direction(d);
    const double deriv = p->grad(t.center).dot(v);
    if (!s) {
      ++unknown;
      CHECK(std::abs(deriv) <= p->smoothness * v.squaredNorm() * step / 2.0 * (1.0 + 1e-9));
    } else {
      CHECK((deriv > 0.0 ? 1 : -1) == *s);
    }
  }
  CHECK(unknown > 0);
}

TEST_CASE("pd_c agrees with pd_dp when the gradient is large") {
  const ProblemPtr p = half_norm_squared(3);
  Vector c(3);
  c << 1.0, 0.5, -0.3;
  const IsotropicTransform t = unit_at(c);
  const double theta = std::asin(1.0 / (2.0 * std::sqrt(2.0) * 3.0));
  OracleHandle oc(OracleKind::Comparator, p);
  const PruneResult rc = pd_c(oc, t, theta, 1e-6);
  CHECK(rc.converged);
  CHECK(rc.unknown_directions.empty());
  CHECK(angle_between(rc.direction, c) <= theta + 1e-12);
  CHECK(rc.queries == 2 * 3 * rc.iterations);
  OracleHandle od(OracleKind::DirectionalPreference, p);
  const PruneResult rd = pd_dp(od, t, theta);
  CHECK((rc.direction - rd.direction).norm() < 1e-12);
  CHECK(rc.iterations <= pd_c_iteration_cap(3));
}

TEST_CASE("pd_c at a stationary point is degenerate") {
  OracleHandle o(OracleKind::Comparator, half_norm_squared(2));
  const PruneResult r = pd_c(o, unit_at(Vector::Zero(2)), std::asin(1.0 / (4.0 * std::sqrt(2.0))), 1e-3);
  CHECK(r.degenerate);
  CHECK_FALSE(r.converged);
  CHECK(r.unknown_directions.size() == 2);
  CHECK((r.direction - Vector::Unit(2, 0)).norm() == 0.0);
}

TEST_CASE("pd_c with one unknown direction") {
  // Zero slope along e_1, strong slope along e_2.
  Vector xs(2);
  xs << 0.0, -1.0;
  const ProblemPtr p = make_quadratic(Matrix::Identity(2, 2), xs, Domain::ball(Vector::Zero(2), 3.0));
  OracleHandle o(OracleKind::Comparator, p);
  const PruneResult r = pd_c(o, unit_at(Vector::Zero(2)), std::asin(1.0 / (4.0 * std::sqrt(2.0))), 1e-3);
  CHECK_FALSE(r.degenerate);
  CHECK(r.converged);
  REQUIRE(r.unknown_directions.size() == 1);
  CHECK(angle_between(r.direction, Vector::Unit(2, 1)) < 1e-12);
  CHECK(r.final_angle == 0.0);
}

TEST_CASE("pd_c iteration cap") {
  CHECK(pd_c_iteration_cap(2) == static_cast<int>(std::ceil(4.0 * std::log(4.0 * std::sqrt(2.0)) + 2.0)));
  CHECK(pd_c_iteration_cap(2) == 9);
}

TEST_CASE("compare_dp tournament") {
  const ProblemPtr p = make_quadratic(2.0 * Matrix::Identity(2, 2), Vector::Zero(2), Domain::ball(Vector::Zero(2), 1.0));
  SUBCASE("single point needs no queries") {
    OracleHandle o(OracleKind::DirectionalPreference, p);
    const std::vector<Vector> pts{Vector::Unit(2, 0) * 0.3};
    CHECK((compare_dp(pts, o, 0.01) - pts[0]).norm() == 0.0);
    CHECK(o.query_count() == 0);
  }
  SUBCASE("two symmetric points") {
    OracleHandle o(OracleKind::DirectionalPreference, p);
    const std::vector<Vector> pts{-0.5 * Vector::Unit(2, 0), 0.5 * Vector::Unit(2, 0)};
    CHECK(p->value(compare_dp(pts, o, 0.01)) <= 0.25 + 0.01);
  }
  SUBCASE("random point sets") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Vector> pts;
      const int m = 1 + trial % 12;
      double best = 1e300;
      for (int i = 0; i < m; ++i) {
        pts.push_back(p->domain.sample(rng));
        best = std::min(best, p->value(pts.back()));
      }
      OracleHandle o(OracleKind::DirectionalPreference, p);
      const double eps = 1e-3;
      const Vector x = compare_dp(pts, o, eps);
      CHECK(p->value(x) <= best + eps);
      const double per_match = std::ceil(std::log2(p->radius * p->lipschitz * m / eps));
      CHECK(o.query_count() <= static_cast<long long>((m - 1) * per_match));
    }
  }
}
