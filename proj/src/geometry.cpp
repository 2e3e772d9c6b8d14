#include "subzero/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace subzero {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kDegenerateEig = 1e-14;
constexpr double kConditionLimit = 1e-13;

Eigen::SelfAdjointEigenSolver<Matrix> eigen_of(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw DegenerateEllipsoidError("eigendecomposition of the ellipsoid shape failed");
  }
  return es;
}

void require_same_dim(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(n) + ", got " + std::to_string(v.size()) + ")");
  }
}

}  // namespace

Ellipsoid::Ellipsoid(Matrix shape_in, Vector center_in)
    : shape(std::move(shape_in)), center(std::move(center_in)) {
  const int n = static_cast<int>(center.size());
  if (n < 1 || shape.rows() != n || shape.cols() != n) {
    throw std::invalid_argument("Ellipsoid: shape must be n x n with n = center size >= 1");
  }
  if (!shape.allFinite() || !center.allFinite()) {
    throw std::invalid_argument("Ellipsoid: non-finite entries");
  }
  const double scale = shape.cwiseAbs().maxCoeff();
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * std::max(scale, 1e-300)) {
    throw std::invalid_argument("Ellipsoid: shape is not symmetric");
  }
  if (eigen_of(shape).eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("Ellipsoid: shape is not positive definite");
  }
}

double Ellipsoid::membership(const Vector& x) const {
  require_same_dim(x, dim(), "Ellipsoid::membership");
  Eigen::LLT<Matrix> llt(shape);
  const Vector z = llt.matrixL().solve(x - center);
  return z.squaredNorm();
}

double Ellipsoid::lambda_max() const { return eigen_of(shape).eigenvalues().maxCoeff(); }

double Ellipsoid::lambda_min() const { return eigen_of(shape).eigenvalues().minCoeff(); }

double Ellipsoid::log_volume() const {
  Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) throw DegenerateEllipsoidError("log_volume: Cholesky failed");
  return llt.matrixLLT().diagonal().array().log().sum();
}

Vector IsotropicTransform::forward(const Vector& x) const {
  return inv_sqrt_shape * (x - center) * scale;
}

Vector IsotropicTransform::inverse(const Vector& y) const {
  return sqrt_shape * y / scale + center;
}

Vector IsotropicTransform::to_original_direction(const Vector& d) const {
  return sqrt_shape * d / scale;
}

IsotropicTransform isotropic(const Ellipsoid& e) {
  if (!e.shape.allFinite() || !e.center.allFinite()) {
    throw DegenerateEllipsoidError("isotropic: non-finite ellipsoid");
  }
  const auto es = eigen_of(e.shape);
  const Vector& lambda = es.eigenvalues();
  const double lmax = lambda.maxCoeff();
  if (!(lmax > 0.0) || lambda.minCoeff() < kDegenerateEig * lmax) {
    throw DegenerateEllipsoidError("isotropic: near-degenerate ellipsoid (lambda_min/lambda_max = " +
                                   std::to_string(lambda.minCoeff() / lmax) + ")");
  }
  const Matrix& v = es.eigenvectors();
  IsotropicTransform t;
  t.sqrt_shape = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  t.inv_sqrt_shape = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  t.scale = std::sqrt(lmax);
  t.center = e.center;
  return t;
}

Cone::Cone(Vector direction_in, double angle) : direction(std::move(direction_in)), semi_vertical_angle(angle) {
  const double norm = direction.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("Cone: direction must be a unit vector");
  }
  if (!(angle >= 0.0 && angle <= std::numbers::pi / 2)) {
    throw std::invalid_argument("Cone: semi-vertical angle must lie in [0, pi/2]");
  }
}

bool Cone::contains(const Vector& w, double tol) const {
  if (w.norm() == 0.0) return true;
  return angle_between(direction, w) <= semi_vertical_angle + tol;
}

double angle_between(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("angle_between: zero vector");
  const Vector ua = a / na;
  const Vector ub = b / nb;
  const double c = ua.dot(ub);
  const double s = (ub - c * ua).norm();
  return std::atan2(s, c);
}

double shallow_cut_volume_ratio(int n, double theta) {
  if (n < 2) throw std::invalid_argument("shallow_cut_volume_ratio: n must be >= 2");
  const double limit = std::asin(1.0 / n);
  if (!(theta >= 0.0 && theta <= limit * (1.0 + 1e-12))) {
    throw std::invalid_argument("shallow_cut_volume_ratio: theta outside [0, arcsin(1/n)]");
  }
  const double s = std::sin(theta);
  const double nn = static_cast<double>(n);
  const double base = nn * nn * (1.0 - s * s) / (nn * nn - 1.0);
  return std::pow(base, (nn - 1.0) / 2.0) * nn * (1.0 + s) / (nn + 1.0);
}

Ellipsoid halfspace_cut(const Ellipsoid& e, const Vector& normal, double alpha) {
  const int n = e.dim();
  if (n < 2) throw std::invalid_argument("halfspace_cut: dimension must be >= 2");
  require_same_dim(normal, n, "halfspace_cut");
  if (!normal.allFinite() || normal.norm() == 0.0) {
    throw std::invalid_argument("halfspace_cut: normal must be finite and nonzero");
  }
  const double nn = static_cast<double>(n);
  if (!(alpha >= -1.0 / nn - 1e-12 && alpha < 1.0)) {
    throw std::invalid_argument("halfspace_cut: depth outside [-1/n, 1)");
  }
  alpha = std::max(alpha, -1.0 / nn);

  const Vector an = e.shape * normal;
  const double q = normal.dot(an);
  if (!(q > 0.0)) throw DegenerateEllipsoidError("halfspace_cut: normal^T A normal is not positive");
  const Vector b = an / std::sqrt(q);

  const double tau = (1.0 + nn * alpha) / (nn + 1.0);
  const double dilation = nn * nn * (1.0 - alpha * alpha) / (nn * nn - 1.0);
  const double sigma = 2.0 * (1.0 + nn * alpha) / ((nn + 1.0) * (1.0 + alpha));

  Matrix shape = dilation * (e.shape - sigma * b * b.transpose());
  shape = 0.5 * (shape + shape.transpose()).eval();
  Vector center = e.center - tau * b;

  const Vector lambda = eigen_of(shape).eigenvalues();
  const double lmax = lambda.maxCoeff();
  if (!(lmax > 0.0) || !(lambda.minCoeff() > kConditionLimit * lmax)) {
    throw DegenerateEllipsoidError("halfspace_cut: shape lost positive definiteness or "
                                   "lambda_min/lambda_max fell below 1e-13");
  }
  Ellipsoid out;
  out.shape = std::move(shape);
  out.center = std::move(center);
  return out;
}

Ellipsoid shallow_cut(const Ellipsoid& e, const IsotropicTransform& t, const Vector& g_iso,
                      double sin_theta) {
  const int n = e.dim();
  require_same_dim(g_iso, n, "shallow_cut");
  if (!g_iso.allFinite() || g_iso.norm() == 0.0) {
    throw std::invalid_argument("shallow_cut: direction must be finite and nonzero");
  }
  if (!(sin_theta >= 0.0 && sin_theta <= 1.0 / n + 1e-15)) {
    throw std::invalid_argument("shallow_cut: sin_theta outside [0, 1/n]");
  }
  // In unit-ball coordinates u = A^{-1/2}(x - x0) the halfspace <g, u> <= s
  // has original normal A^{-1/2} g with sqrt(a^T A a) = |g|.
  const Vector normal = t.inv_sqrt_shape * (g_iso / g_iso.norm());
  return halfspace_cut(e, normal, -sin_theta);
}

Ellipsoid shallow_cut(const Ellipsoid& e, const Vector& g_iso, double sin_theta) {
  return shallow_cut(e, isotropic(e), g_iso, sin_theta);
}

std::vector<Vector> orthonormal_completion(std::span<const Vector> fixed, const Vector& lead) {
  const int n = static_cast<int>(lead.size());
  constexpr double kTol = 1e-9;
  if (std::abs(lead.norm() - 1.0) > kTol) {
    throw std::invalid_argument("orthonormal_completion: lead must be a unit vector");
  }
  if (static_cast<int>(fixed.size()) >= n) {
    throw std::invalid_argument("orthonormal_completion: too many fixed vectors");
  }
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    require_same_dim(fixed[i], n, "orthonormal_completion");
    for (std::size_t j = 0; j <= i; ++j) {
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(fixed[i].dot(fixed[j]) - expected) > kTol) {
        throw std::invalid_argument("orthonormal_completion: fixed vectors are not orthonormal");
      }
    }
  }
  Vector residual = lead;
  for (const auto& f : fixed) residual -= f.dot(residual) * f;
  if (residual.norm() < kTol) {
    throw std::invalid_argument("orthonormal_completion: lead lies in span(fixed)");
  }
  for (const auto& f : fixed) {
    if (std::abs(f.dot(lead)) > kTol) {
      throw std::invalid_argument("orthonormal_completion: lead is not orthogonal to fixed");
    }
  }

  std::vector<Vector> span(fixed.begin(), fixed.end());
  span.push_back(lead);
  std::vector<Vector> out{lead};
  std::vector<bool> used(n, false);
  auto project_out = [&span](Vector v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : span) v -= q.dot(v) * q;
    }
    return v;
  };
  while (static_cast<int>(span.size()) < n) {
    int best = -1;
    double best_norm = -1.0;
    Vector best_vec;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      Vector r = project_out(Vector::Unit(n, j));
      const double rn = r.norm();
      if (rn > best_norm + 1e-12) {
        best = j;
        best_norm = rn;
        best_vec = std::move(r);
      }
    }
    if (best < 0 || best_norm < kTol) {
      throw std::runtime_error("orthonormal_completion: ran out of independent directions");
    }
    used[best] = true;
    best_vec = project_out(best_vec / best_norm);
    best_vec.normalize();
    span.push_back(best_vec);
    out.push_back(best_vec);
  }
  return out;
}

Cone cone_prune_geometry(double gamma, std::span<const int> signs, std::span<const Vector> basis) {
  if (!(gamma > 0.0 && gamma <= std::numbers::pi / 2 + 1e-15)) {
    throw std::invalid_argument("cone_prune_geometry: gamma outside (0, pi/2]");
  }
  if (basis.size() < 2 || signs.size() != basis.size()) {
    throw std::invalid_argument("cone_prune_geometry: need >= 2 active directions and one sign each");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("cone_prune_geometry: signs must be +-1");
  }
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  const Vector lead = signs[0] * basis[0];
  Vector sum = lead;
  Vector second;
  for (std::size_t i = 1; i < basis.size(); ++i) {
    Vector w = lead * c + signs[i] * basis[i] * s;
    if (i == 1) second = w;
    sum += w;
  }
  const Vector p = sum.normalized();
  const double cosine = std::clamp(p.dot(second), -1.0, 1.0);
  return Cone(p, std::acos(cosine));
}

Vector farthest_point(const Ellipsoid& e, const Vector& from) {
  const int n = e.dim();
  require_same_dim(from, n, "farthest_point");
  const auto es = eigen_of(e.shape);
  const Vector lambda = es.eigenvalues().cwiseMax(0.0);
  const Matrix& v = es.eigenvectors();
  const Vector y = v.transpose() * (e.center - from);
  const double lmax = lambda.maxCoeff();

  Vector u = Vector::Zero(n);
  const Vector weights = (lambda.array() * y.array().square()).matrix();
  double top_mass = 0.0;
  for (int i = 0; i < n; ++i) {
    if (lambda(i) >= lmax * (1.0 - 1e-12)) top_mass += weights(i);
  }
  auto secular = [&](double mu) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gap = mu - lambda(i);
      if (gap > 0.0) acc += weights(i) / (gap * gap);
    }
    return acc;
  };
  const double total = weights.sum();
  const int top = static_cast<int>(std::max_element(lambda.data(), lambda.data() + n) - lambda.data());

  bool hard_case = top_mass <= 1e-30 * std::max(total, 1e-300);
  if (hard_case) {
    // Secular function stays bounded at lambda_max; fill the top eigenvector.
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (lambda(i) >= lmax * (1.0 - 1e-12)) continue;
      u(i) = std::sqrt(lambda(i)) * y(i) / (lmax - lambda(i));
      acc += u(i) * u(i);
    }
    if (acc <= 1.0) {
      u(top) = std::sqrt(1.0 - acc);
    } else {
      hard_case = false;
      u.setZero();
    }
  }
  if (!hard_case) {
    double lo = lmax;
    double hi = lmax + std::sqrt(total) + 1e-300;
    while (secular(hi) > 1.0) hi = lmax + 2.0 * (hi - lmax);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (secular(mid) > 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    for (int i = 0; i < n; ++i) u(i) = std::sqrt(lambda(i)) * y(i) / (hi - lambda(i));
    const double un = u.norm();
    if (un > 0.0) u /= un;
  }
  return e.center + v * (lambda.cwiseSqrt().asDiagonal() * u);
}

}  // namespace subzero
