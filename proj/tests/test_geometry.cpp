#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "subzero/geometry.hpp"

using namespace subzero;

namespace {

Matrix random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return m * m.transpose() + 0.5 * Matrix::Identity(n, n);
}

Vector random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("ellipsoid rejects invalid shapes") {
  CHECK_THROWS_AS(Ellipsoid(Matrix::Identity(2, 2), Vector::Zero(3)), std::invalid_argument);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(Ellipsoid(asym, Vector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(Ellipsoid(-Matrix::Identity(2, 2), Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("ellipsoid membership and volume") {
  Matrix a(2, 2);
  a << 4, 0, 0, 1;
  const Ellipsoid e(a, Vector::Zero(2));
  CHECK(e.membership(Vector::Unit(2, 0) * 2.0) == doctest::Approx(1.0));
  CHECK(e.contains(Vector::Unit(2, 1)));
  CHECK_FALSE(e.contains(Vector::Unit(2, 1) * 1.01));
  CHECK(e.log_volume() == doctest::Approx(std::log(2.0)));
  CHECK(e.lambda_max() == doctest::Approx(4.0));
  CHECK(e.lambda_min() == doctest::Approx(1.0));
}

TEST_CASE("isotropic transform") {
  SUBCASE("identity shape is a translation") {
    Vector c(2);
    c << 0.3, -0.7;
    const IsotropicTransform t = isotropic(Ellipsoid(Matrix::Identity(2, 2), c));
    Vector x(2);
    x << 1.0, 2.0;
    CHECK((t.forward(x) - (x - c)).norm() < 1e-14);
  }
  SUBCASE("diagonal shape") {
    Matrix a(2, 2);
    a << 4, 0, 0, 1;
    const IsotropicTransform t = isotropic(Ellipsoid(a, Vector::Zero(2)));
    CHECK((t.forward(Vector::Unit(2, 0) * 2.0) - Vector::Unit(2, 0) * 2.0).norm() < 1e-14);
    CHECK((t.forward(Vector::Unit(2, 1)) - Vector::Unit(2, 1) * 2.0).norm() < 1e-14);
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 6;
      const Ellipsoid e(random_spd(n, rng), random_vector(n, rng));
      const IsotropicTransform t = isotropic(e);
      const Vector x = random_vector(n, rng);
      CHECK((t.inverse(t.forward(x)) - x).norm() < 1e-10 * (1.0 + x.norm()));
      const Vector y = t.to_original_direction(x);
      CHECK((t.inverse(x) - t.center - y).norm() < 1e-10 * (1.0 + y.norm()));
    }
  }
  SUBCASE("near-degenerate shape is rejected") {
    Matrix a(2, 2);
    a << 1, 0, 0, 1e-15;
    CHECK_THROWS_AS(isotropic(Ellipsoid(a, Vector::Zero(2))), DegenerateEllipsoidError);
  }
}

TEST_CASE("shallow cut volume ratio closed form") {
  CHECK(shallow_cut_volume_ratio(2, 0.0) == doctest::Approx(0.769800).epsilon(1e-6));
  const double r = shallow_cut_volume_ratio(2, std::asin(0.25));
  CHECK(r == doctest::Approx(0.931695).epsilon(1e-6));
  CHECK(r <= std::exp(-1.0 / 24.0));
  CHECK_THROWS_AS(shallow_cut_volume_ratio(2, std::asin(0.6)), std::invalid_argument);
  CHECK_THROWS_AS(shallow_cut_volume_ratio(1, 0.0), std::invalid_argument);
}

TEST_CASE("central cut of the unit ball") {
  for (int n = 2; n <= 6; ++n) {
    const Ellipsoid e(Matrix::Identity(n, n), Vector::Zero(n));
    const Ellipsoid out = shallow_cut(e, Vector::Unit(n, 0), 0.0);
    CHECK(out.center(0) == doctest::Approx(-1.0 / (n + 1)));
    CHECK(out.center.tail(n - 1).norm() < 1e-14);
  }
}

TEST_CASE("shallow cut determinant ratio") {
  const Ellipsoid e(Matrix::Identity(2, 2), Vector::Zero(2));
  const Ellipsoid out = shallow_cut(e, Vector::Unit(2, 0), 0.25);
  CHECK(out.shape.determinant() == doctest::Approx(0.931695 * 0.931695).epsilon(1e-6));
  CHECK_THROWS_AS(shallow_cut(e, Vector::Unit(2, 0), 0.6), std::invalid_argument);
  CHECK_THROWS_AS(shallow_cut(e, Vector::Zero(2), 0.25), std::invalid_argument);
}

TEST_CASE("shallow cut keeps the retained half-ball") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 2; n <= 6; ++n) {
    const Ellipsoid e(random_spd(n, rng), random_vector(n, rng));
    const IsotropicTransform t = isotropic(e);
    Vector g = random_vector(n, rng);
    const double s = u(rng) / n;
    const Ellipsoid out = shallow_cut(e, t, g, s);
    g.normalize();
    int checked = 0;
    while (checked < 1000) {
      Vector x = random_vector(n, rng);
      x *= std::pow(u(rng), 1.0 / n) / x.norm();
      if (g.dot(x) > s) continue;
      ++checked;
      CHECK(out.membership(t.inverse(x * t.scale)) <= 1.0 + 1e-9);
    }
    const Ellipsoid ball(Matrix::Identity(n, n), Vector::Zero(n));
    const Ellipsoid cut_ball = shallow_cut(ball, g, s);
    for (int j = 0; j < n; ++j) {
      for (double sign : {-1.0, 1.0}) {
        const Vector x = sign * Vector::Unit(n, j);
        if (g.dot(x) <= s) CHECK(cut_ball.membership(x) <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("halfspace cut removes the excluded side") {
  const Ellipsoid e(Matrix::Identity(3, 3), Vector::Zero(3));
  const Ellipsoid out = halfspace_cut(e, Vector::Unit(3, 0), 0.5);
  CHECK(out.center(0) < 0.0);
  CHECK_FALSE(out.contains(Vector::Unit(3, 0) * 0.9));
  CHECK(out.contains(-Vector::Unit(3, 0)));
  CHECK_THROWS_AS(halfspace_cut(e, Vector::Unit(3, 0), -0.5), std::invalid_argument);
}

TEST_CASE("orthonormal completion") {
  SUBCASE("identity case") {
    const std::vector<Vector> b = orthonormal_completion({}, Vector::Unit(4, 0));
    REQUIRE(b.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(std::abs(b[i](i)) - 1.0) < 1e-12);
  }
  SUBCASE("unique complement in the plane") {
    Vector lead(2);
    lead << 1.0, 1.0;
    lead /= std::sqrt(2.0);
    const std::vector<Vector> b = orthonormal_completion({}, lead);
    REQUIRE(b.size() == 2);
    CHECK(std::abs(b[1](0) + b[1](1)) < 1e-12);
    CHECK(std::abs(std::abs(b[1](0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("random inputs give an orthonormal basis") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 3 + trial % 5;
      const int k = trial % (n - 1);
      Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::NullaryExpr(n, n, [&] {
                   return std::normal_distribution<double>()(rng);
                 })).householderQ();
      std::vector<Vector> fixed;
      for (int i = 0; i < k; ++i) fixed.push_back(q.col(i));
      const std::vector<Vector> out = orthonormal_completion(fixed, q.col(k));
      REQUIRE(static_cast<int>(out.size()) == n - k);
      Matrix all(n, n);
      for (int i = 0; i < k; ++i) all.col(i) = fixed[i];
      for (int i = 0; i < n - k; ++i) all.col(k + i) = out[i];
      CHECK((all.transpose() * all - Matrix::Identity(n, n)).norm() < 1e-9);
      CHECK((out[0] - q.col(k)).norm() < 1e-12);
    }
  }
  SUBCASE("lead in the span of fixed is rejected") {
    const std::vector<Vector> fixed{Vector::Unit(3, 0)};
    CHECK_THROWS_AS(orthonormal_completion(fixed, Vector::Unit(3, 0)), std::invalid_argument);
  }
}

TEST_CASE("cone prune geometry") {
  SUBCASE("planar quarter turn") {
    const std::vector<Vector> basis{Vector::Unit(2, 0), Vector::Unit(2, 1)};
    const std::vector<int> signs{1, 1};
    const Cone c = cone_prune_geometry(std::numbers::pi / 2, signs, basis);
    CHECK(c.semi_vertical_angle == doctest::Approx(std::numbers::pi / 4));
    CHECK(c.direction(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(c.direction(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
  SUBCASE("three directions at a right angle") {
    const std::vector<Vector> basis{Vector::Unit(3, 0), Vector::Unit(3, 1), Vector::Unit(3, 2)};
    const std::vector<int> signs{1, 1, 1};
    const Cone c = cone_prune_geometry(std::numbers::pi / 2, signs, basis);
    CHECK(c.semi_vertical_angle == doctest::Approx(0.955317).epsilon(1e-6));
  }
  SUBCASE("three directions at a quarter angle") {
    const std::vector<Vector> basis{Vector::Unit(3, 0), Vector::Unit(3, 1), Vector::Unit(3, 2)};
    const std::vector<int> signs{1, 1, 1};
    const double g = std::numbers::pi / 4;
    const Cone c = cone_prune_geometry(g, signs, basis);
    CHECK(std::sin(c.semi_vertical_angle) / std::sin(g) == doctest::Approx(0.757115).epsilon(1e-6));
  }
  SUBCASE("signs flip the new direction") {
    const std::vector<Vector> basis{Vector::Unit(2, 0), Vector::Unit(2, 1)};
    const std::vector<int> signs{1, -1};
    const Cone c = cone_prune_geometry(std::numbers::pi / 2, signs, basis);
    CHECK(c.direction(1) < 0.0);
  }
  SUBCASE("pruned cone contains the surviving part of the old cone") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.05, std::numbers::pi / 2);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + trial % 5;
      const double g = u(rng);
      std::vector<Vector> basis;
      for (int i = 0; i < n; ++i) basis.push_back(Vector::Unit(n, i));
      Vector w = random_vector(n, rng);
      w(0) = std::abs(w(0)) + 1e-3;
      w.tail(n - 1) *= std::tan(g) * w(0) / w.tail(n - 1).norm() * std::uniform_real_distribution<double>(0, 1)(rng);
      std::vector<int> signs(n);
      signs[0] = 1;
      for (int i = 1; i < n; ++i) signs[i] = w(i) < 0.0 ? -1 : 1;
      const Cone c = cone_prune_geometry(g, signs, basis);
      CHECK(c.contains(w, 1e-9));
    }
  }
  SUBCASE("invalid input") {
    const std::vector<Vector> one{Vector::Unit(2, 0)};
    const std::vector<int> s1{1};
    CHECK_THROWS_AS(cone_prune_geometry(1.0, s1, one), std::invalid_argument);
    const std::vector<Vector> two{Vector::Unit(2, 0), Vector::Unit(2, 1)};
    const std::vector<int> s2{1, 1};
    CHECK_THROWS_AS(cone_prune_geometry(0.0, s2, two), std::invalid_argument);
  }
}

TEST_CASE("angle between") {
  CHECK(angle_between(Vector::Unit(3, 0), Vector::Unit(3, 1)) == doctest::Approx(std::numbers::pi / 2));
  CHECK(angle_between(Vector::Unit(3, 0), -Vector::Unit(3, 0)) == doctest::Approx(std::numbers::pi));
  Vector a(2);
  a << 1.0, 1e-12;
  CHECK(angle_between(a, Vector::Unit(2, 0)) == doctest::Approx(1e-12).epsilon(1e-6));
}

TEST_CASE("farthest point of an ellipsoid") {
  Matrix a(2, 2);
  a << 4, 0, 0, 1;
  const Ellipsoid e(a, Vector::Zero(2));
  const Vector p = farthest_point(e, Vector::Zero(2));
  CHECK(std::abs(p(0)) == doctest::Approx(2.0));
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Ellipsoid f(random_spd(3, rng), random_vector(3, rng));
    const Vector from = random_vector(3, rng) * 3.0;
    const Vector q = farthest_point(f, from);
    CHECK(f.membership(q) == doctest::Approx(1.0).epsilon(1e-8));
    const IsotropicTransform t = isotropic(f);
    for (int s = 0; s < 200; ++s) {
      Vector u = random_vector(3, rng);
      u *= t.scale / u.norm();
      CHECK((t.inverse(u) - from).norm() <= (q - from).norm() + 1e-8);
    }
  }
}
