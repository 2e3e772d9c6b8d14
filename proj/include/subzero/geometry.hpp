#pragma once

#include <span>
#include <vector>

#include "subzero/types.hpp"

namespace subzero {

/// E(A, x0) = { x : (x - x0)^T A^{-1} (x - x0) <= 1 } with A symmetric positive definite.
struct Ellipsoid {
  Matrix shape;
  Vector center;

  Ellipsoid() = default;
  /// Validates symmetry (1e-12 relative) and positive definiteness.
  Ellipsoid(Matrix shape, Vector center);

  int dim() const { return static_cast<int>(center.size()); }

  /// (x - x0)^T A^{-1} (x - x0); the point is inside iff this is <= 1.
  double membership(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-9) const { return membership(x) <= 1.0 + tol; }

  double lambda_max() const;
  double lambda_min() const;
  /// ln(Vol(E) / Vol(unit ball)) = ln det(A) / 2.
  double log_volume() const;
};

/// T(x) = A^{-1/2} (x - x0) sqrt(lambda_max(A)). Maps E(A, x0) onto the ball of
/// radius sqrt(lambda_max(A)) around the origin.
struct IsotropicTransform {
  Matrix inv_sqrt_shape;
  Matrix sqrt_shape;
  double scale = 0.0;
  Vector center;

  Vector forward(const Vector& x) const;
  Vector inverse(const Vector& y) const;
  /// Linear part of the inverse map, A^{1/2} d / scale. Directional
  /// derivatives of f o T^{-1} along d are derivatives of f along this vector.
  Vector to_original_direction(const Vector& d) const;
};

/// Matrix square roots by symmetric eigendecomposition. Throws
/// DegenerateEllipsoidError on non-finite entries or when
/// lambda_min < 1e-14 * lambda_max.
IsotropicTransform isotropic(const Ellipsoid& e);

/// Right circular cone F(v, theta) = { w : angle(v, w) <= theta }.
struct Cone {
  Vector direction;
  double semi_vertical_angle = 0.0;

  Cone() = default;
  Cone(Vector direction, double semi_vertical_angle);

  bool contains(const Vector& w, double tol = 0.0) const;
};

/// Angle between two nonzero vectors in [0, pi], computed with atan2 for accuracy near 0 and pi.
double angle_between(const Vector& a, const Vector& b);

/// { x : normal^T x <= offset }.
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  bool contains(const Vector& x) const { return normal.dot(x) <= offset; }
};

/// Vol(E*) / Vol(E(I, 0)) for the minimum-volume ellipsoid around
/// E(I, 0) ∩ { <u, x> <= sin(theta) }, theta in [0, arcsin(1/n)].
double shallow_cut_volume_ratio(int n, double theta);

/// Minimum-volume ellipsoid containing e ∩ { x : normal^T (x - x0) <= -alpha * sqrt(normal^T A normal) }.
/// alpha in [-1/n, 1): negative alpha keeps more than half (shallow), zero is
/// a central cut, positive is a deep cut. The result is re-symmetrized and
/// rejected with DegenerateEllipsoidError when lambda_min / lambda_max < 1e-13.
Ellipsoid halfspace_cut(const Ellipsoid& e, const Vector& normal, double alpha);

/// Shallow cut in isotropic coordinates: keeps T^{-1}(E(I,0) ∩ {<g/|g|, u> <= sin_theta})
/// where u are the unit-ball coordinates of e. sin_theta in [0, 1/n].
Ellipsoid shallow_cut(const Ellipsoid& e, const Vector& g_iso, double sin_theta);
Ellipsoid shallow_cut(const Ellipsoid& e, const IsotropicTransform& t, const Vector& g_iso,
                      double sin_theta);

/// Completes {fixed..., lead} to an orthonormal basis of R^n. Returns
/// (lead, d_{k+2}, ..., d_n). Each new vector is the standard basis vector with
/// the largest residual after projection (lowest index on ties), orthogonalized twice.
std::vector<Vector> orthonormal_completion(std::span<const Vector> fixed, const Vector& lead);

/// One pruning step. basis[0] is the current cone direction, basis[1..] the
/// remaining active orthonormal directions; signs[i] is the observed sign of
/// the directional derivative along basis[i]. Builds w_0 = s_0 b_0 and
/// w_i = s_0 b_0 cos(gamma) + s_i b_i sin(gamma), returns F(p, gamma') with p the
/// normalized sum of the w_i and gamma' = arccos <p, w_1>.
Cone cone_prune_geometry(double gamma, std::span<const int> signs, std::span<const Vector> basis);

/// Point of e farthest (Euclidean) from `from`, by solving the trust-region
/// secular equation in the eigenbasis of the shape matrix.
Vector farthest_point(const Ellipsoid& e, const Vector& from);

}  // namespace subzero
