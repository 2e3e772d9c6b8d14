#include <cmath>
#include <random>

#include <doctest.h>

#include "subzero/oracles.hpp"

using namespace subzero;

namespace {

ProblemPtr half_norm_squared() {
  return make_quadratic(Matrix::Identity(2, 2), Vector::Zero(2), Domain::ball(Vector::Zero(2), 2.0));
}

}  // namespace

TEST_CASE("directional preference") {
  OracleHandle o(OracleKind::DirectionalPreference, half_norm_squared());
  CHECK(o.query_dp(Vector::Unit(2, 0), -Vector::Unit(2, 0)) == -1);
  CHECK(o.query_dp(Vector::Unit(2, 0), Vector::Unit(2, 1)) == 1);
  CHECK(o.query_count() == 2);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Matrix q(3, 3);
  q << 3, 1, 0, 1, 2, 0.5, 0, 0.5, 1;
  Vector xs(3);
  xs << 0.1, -0.2, 0.3;
  const ProblemPtr p = make_quadratic(q, xs, Domain::ball(Vector::Zero(3), 1.0));
  OracleHandle r(OracleKind::DirectionalPreference, p);
  for (int i = 0; i < 500; ++i) {
    const Vector x = p->domain.sample(rng);
    const Vector y = Vector::NullaryExpr(3, [&] { return g(rng); });
    const double d = (q * (x - xs)).dot(y);
    CHECK(r.query_dp(x, y) == (d < 0.0 ? -1 : 1));
  }
}

TEST_CASE("comparator") {
  OracleHandle o(OracleKind::Comparator, half_norm_squared());
  CHECK(o.query_comparator(Vector::Unit(2, 0), Vector::Unit(2, 0)) == -1);
  CHECK(o.query_comparator(Vector::Zero(2), Vector::Unit(2, 0)) == 1);

  OracleHandle dp(OracleKind::DirectionalPreference, half_norm_squared());
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const double k = 1e-3;
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    const Vector x = 0.5 * Vector::NullaryExpr(2, [&] { return g(rng); }).cwiseMax(-1.5).cwiseMin(1.5);
    const Vector y = Vector::NullaryExpr(2, [&] { return g(rng); });
    if (!o.problem().domain.contains(x) || !o.problem().domain.contains(x + k * y)) continue;
    if (std::abs(x.dot(y)) <= k * y.squaredNorm() / 2.0) continue;
    CHECK(o.query_comparator(x, x + k * y) == dp.query_dp(x, y));
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("value and noisy value") {
  OracleHandle v(OracleKind::Value, half_norm_squared());
  CHECK(v.query_value(Vector::Zero(2)) == 0.0);
  CHECK(v.query_value(Vector::Ones(2)) == doctest::Approx(1.0));

  OracleHandle exact(OracleKind::NoisyValue, half_norm_squared(), 0.0, 1);
  CHECK(exact.query_noisy_value(Vector::Ones(2)) == 1.0);

  OracleHandle a(OracleKind::NoisyValue, half_norm_squared(), 0.3, 17);
  OracleHandle b(OracleKind::NoisyValue, half_norm_squared(), 0.3, 17);
  double sum = 0.0, sum2 = 0.0;
  const int m = 20000;
  for (int i = 0; i < m; ++i) {
    const double za = a.query_noisy_value(Vector::Ones(2)) - 1.0;
    CHECK(za == b.query_noisy_value(Vector::Ones(2)) - 1.0);
    sum += za;
    sum2 += za * za;
  }
  CHECK(std::abs(sum / m) < 5.0 * 0.3 / std::sqrt(m));
  CHECK(std::sqrt(sum2 / m) == doctest::Approx(0.3).epsilon(0.03));
}

TEST_CASE("feasibility, budget and kind checks") {
  OracleHandle o(OracleKind::Value, half_norm_squared(), 0.0, 0, 2);
  CHECK_THROWS_AS(o.query_value(Vector::Unit(2, 0) * 2.5), InfeasibleQueryError);
  CHECK(o.query_count() == 0);
  o.query_value(Vector::Zero(2));
  o.query_value(Vector::Zero(2));
  CHECK(o.remaining() == 0);
  CHECK_THROWS_AS(o.query_value(Vector::Zero(2)), BudgetExhaustedError);
  CHECK(o.query_count() == 2);
  CHECK_THROWS_AS(o.query_dp(Vector::Zero(2), Vector::Unit(2, 0)), std::logic_error);

  OracleHandle c(OracleKind::Comparator, half_norm_squared());
  CHECK_THROWS_AS(c.query_comparator(Vector::Zero(2), Vector::Unit(2, 1) * 3.0), InfeasibleQueryError);
  CHECK(to_string(OracleKind::NoisyValue) == "noisy-value");
}
