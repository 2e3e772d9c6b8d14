#include "subzero/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace subzero {
namespace {

using nlohmann::json;

void require_dim(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

Vector gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

Vector uniform_in_ball(int n, double radius, std::mt19937_64& rng) {
  Vector v = gaussian_vector(n, rng);
  while (v.norm() == 0.0) v = gaussian_vector(n, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = radius * std::pow(unif(rng), 1.0 / n);
  return v.normalized() * r;
}

double max_eigenvalue(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Radius of the largest ball around the domain center that fits inside.
double inner_radius(const Domain& d) {
  if (d.kind == Domain::Kind::Ball) return d.radius;
  return 0.5 * (d.upper - d.lower).minCoeff();
}

}  // namespace

Domain Domain::ball(Vector center, double radius) {
  if (center.size() < 1 || !center.allFinite() || !std::isfinite(radius) || !(radius > 0.0)) {
    throw std::invalid_argument("Domain::ball: need finite center and radius > 0");
  }
  Domain d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

Domain Domain::box(Vector lower, Vector upper) {
  if (lower.size() < 1 || lower.size() != upper.size() || !lower.allFinite() || !upper.allFinite()) {
    throw std::invalid_argument("Domain::box: bounds must be finite and of equal size");
  }
  if (!((upper - lower).minCoeff() > 0.0)) {
    throw std::invalid_argument("Domain::box: every upper bound must exceed its lower bound");
  }
  Domain d;
  d.kind = Kind::Box;
  d.center = 0.5 * (lower + upper);
  d.lower = std::move(lower);
  d.upper = std::move(upper);
  return d;
}

bool Domain::contains(const Vector& x, double tol) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  if (kind == Kind::Ball) return (x - center).norm() <= radius + tol * std::max(radius, 1.0);
  for (int i = 0; i < dim(); ++i) {
    const double slack = tol * std::max(1.0, upper(i) - lower(i));
    if (x(i) < lower(i) - slack || x(i) > upper(i) + slack) return false;
  }
  return true;
}

std::optional<Halfspace> Domain::separate(const Vector& x) const {
  require_dim(x, dim(), "Domain::separate");
  if (contains(x)) return std::nullopt;
  if (kind == Kind::Ball) {
    const Vector a = (x - center).normalized();
    return Halfspace{a, a.dot(center) + radius};
  }
  int best = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  bool upper_face = true;
  for (int i = 0; i < dim(); ++i) {
    if (x(i) - upper(i) > best_gap) {
      best = i;
      best_gap = x(i) - upper(i);
      upper_face = true;
    }
    if (lower(i) - x(i) > best_gap) {
      best = i;
      best_gap = lower(i) - x(i);
      upper_face = false;
    }
  }
  Vector a = Vector::Zero(dim());
  a(best) = upper_face ? 1.0 : -1.0;
  return Halfspace{a, upper_face ? upper(best) : -lower(best)};
}

std::optional<Halfspace> Domain::separate(const Ellipsoid& e, double scale) const {
  require_dim(e.center, dim(), "Domain::separate");
  if (!(scale >= 0.0)) throw std::invalid_argument("Domain::separate: scale must be >= 0");
  if (scale == 0.0) return separate(e.center);
  if (kind == Kind::Ball) {
    const Ellipsoid scaled(scale * scale * e.shape, e.center);
    const Vector far = farthest_point(scaled, center);
    const double dist = (far - center).norm();
    if (dist <= radius) return std::nullopt;
    const Vector a = (far - center) / dist;
    return Halfspace{a, a.dot(center) + radius};
  }
  int best = -1;
  double best_depth = -scale;
  bool upper_face = true;
  for (int i = 0; i < dim(); ++i) {
    const double w = std::sqrt(e.shape(i, i));
    const double up = (e.center(i) - upper(i)) / w;
    const double lo = (lower(i) - e.center(i)) / w;
    if (up > best_depth) {
      best = i;
      best_depth = up;
      upper_face = true;
    }
    if (lo > best_depth) {
      best = i;
      best_depth = lo;
      upper_face = false;
    }
  }
  if (best < 0) return std::nullopt;
  Vector a = Vector::Zero(dim());
  a(best) = upper_face ? 1.0 : -1.0;
  return Halfspace{a, upper_face ? upper(best) : -lower(best)};
}

double Domain::radius_bound() const {
  if (kind == Kind::Ball) return radius;
  return 0.5 * (upper - lower).norm();
}

Vector Domain::sample(std::mt19937_64& rng) const {
  if (kind == Kind::Ball) return center + uniform_in_ball(dim(), radius, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x(dim());
  for (int i = 0; i < dim(); ++i) x(i) = lower(i) + (upper(i) - lower(i)) * unif(rng);
  return x;
}

Ellipsoid initial_ellipsoid(const Domain& d) {
  const int n = d.dim();
  if (d.kind == Domain::Kind::Ball) {
    if (!(d.radius > 0.0)) throw std::invalid_argument("initial_ellipsoid: zero radius");
    return Ellipsoid(d.radius * d.radius * Matrix::Identity(n, n), d.center);
  }
  const Vector half = 0.5 * (d.upper - d.lower);
  if (!(half.minCoeff() > 0.0)) throw std::invalid_argument("initial_ellipsoid: zero box width");
  return Ellipsoid(Matrix((n * half.array().square()).matrix().asDiagonal()), d.center);
}

ProblemPtr make_quadratic(const Matrix& q, const Vector& x_star, const Domain& domain) {
  const int n = domain.dim();
  if (q.rows() != n || q.cols() != n) throw std::invalid_argument("make_quadratic: Q must be n x n");
  require_dim(x_star, n, "make_quadratic");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("make_quadratic: Q must be symmetric");
  }
  Eigen::LLT<Matrix> llt(q);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("make_quadratic: Q must be positive definite");
  if (!domain.contains(x_star)) throw AssumptionError("make_quadratic: x* lies outside the domain");

  auto p = std::make_shared<ProblemInstance>();
  const Matrix qs = 0.5 * (q + q.transpose());
  const Vector xs = x_star;
  p->kind = "quadratic";
  p->dimension = n;
  p->objective = [qs, xs](const Vector& x) {
    const Vector d = x - xs;
    return 0.5 * d.dot(qs * d);
  };
  p->gradient = [qs, xs](const Vector& x) -> Vector { return qs * (x - xs); };
  p->domain = domain;
  const double lmax = max_eigenvalue(qs);
  p->radius = domain.radius_bound();
  p->smoothness = lmax;
  p->lipschitz = lmax * (p->radius + (domain.center - xs).norm());
  p->optimum_value = 0.0;
  p->optimum_point = xs;
  p->provenance = "analytic";
  return p;
}

ProblemPtr make_logsumexp(const Matrix& directions, double temperature, const Domain& domain,
                          const Vector& offsets) {
  const int n = domain.dim();
  const int m = static_cast<int>(directions.rows());
  if (m < 1 || directions.cols() != n) throw std::invalid_argument("make_logsumexp: directions must be m x n");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("make_logsumexp: temperature must be > 0");
  }
  const Vector b = offsets.size() == 0 ? Vector::Zero(m) : offsets;
  if (b.size() != m) throw std::invalid_argument("make_logsumexp: one offset per direction");

  const Matrix a = directions;
  const double t = temperature;
  auto value = [a, b, t](const Vector& x) {
    const Vector z = (a * x + b) / t;
    const double zmax = z.maxCoeff();
    return t * (zmax + std::log((z.array() - zmax).exp().sum()));
  };
  auto weights = [a, b, t](const Vector& x) -> Vector {
    const Vector z = (a * x + b) / t;
    const Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
    return (e / e.sum()).matrix();
  };
  auto gradient = [a, weights](const Vector& x) -> Vector { return a.transpose() * weights(x); };

  // Damped Newton reference solve for the unconstrained minimizer.
  Vector x = domain.center;
  double gnorm = gradient(x).norm();
  int iters = 0;
  for (; iters < 200 && gnorm > 1e-12; ++iters) {
    const Vector pi = weights(x);
    const Vector g = a.transpose() * pi;
    Matrix h = a.transpose() * (Matrix(pi.asDiagonal()) - pi * pi.transpose()) * a / t;
    h.diagonal().array() += 1e-12 * (1.0 + h.trace());
    const Vector step = -h.ldlt().solve(g);
    const double f0 = value(x);
    double s = 1.0;
    while (s > 1e-12 && value(x + s * step) > f0 + 1e-4 * s * g.dot(step)) s *= 0.5;
    x += s * step;
    gnorm = gradient(x).norm();
  }
  if (!domain.contains(x)) {
    throw AssumptionError("make_logsumexp: the minimizer lies outside the domain");
  }

  auto p = std::make_shared<ProblemInstance>();
  p->kind = "logsumexp";
  p->dimension = n;
  p->objective = value;
  p->gradient = gradient;
  p->domain = domain;
  const double amax = a.rowwise().norm().maxCoeff();
  p->lipschitz = amax;
  p->smoothness = amax * amax / t;
  p->radius = domain.radius_bound();
  p->optimum_point = x;
  p->optimum_value = value(x);
  std::ostringstream prov;
  prov << "damped Newton reference solve: " << iters << " iterations, gradient norm " << gnorm;
  p->provenance = prov.str();
  return p;
}

ProblemPtr make_smoothed_norm(const Vector& x_star, double mu, const Domain& domain) {
  const int n = domain.dim();
  require_dim(x_star, n, "make_smoothed_norm");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("make_smoothed_norm: mu must be > 0");
  if (!domain.contains(x_star)) throw AssumptionError("make_smoothed_norm: x* lies outside the domain");
  const Vector xs = x_star;
  auto p = std::make_shared<ProblemInstance>();
  p->kind = "smoothed_norm";
  p->dimension = n;
  p->objective = [xs, mu](const Vector& x) { return std::sqrt((x - xs).squaredNorm() + mu * mu); };
  p->gradient = [xs, mu](const Vector& x) -> Vector {
    const Vector d = x - xs;
    return d / std::sqrt(d.squaredNorm() + mu * mu);
  };
  p->domain = domain;
  p->lipschitz = 1.0;
  p->smoothness = 1.0 / mu;
  p->radius = domain.radius_bound();
  p->optimum_value = mu;
  p->optimum_point = xs;
  p->provenance = "analytic";
  return p;
}

void check_interior(const ProblemInstance& p, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("check_interior: eps must be > 0");
  const double r = std::sqrt(eps / p.lipschitz);
  const Ellipsoid ball(r * r * Matrix::Identity(p.dimension, p.dimension), p.optimum_point);
  if (p.domain.separate(ball, 1.0)) {
    std::ostringstream msg;
    msg << "the ball of radius sqrt(eps/L) = " << r << " around x* leaves the domain";
    throw AssumptionError(msg.str());
  }
}

namespace {

std::vector<double> json_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(field, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Vector to_vector(const json& j, const std::string& field, int n) {
  const auto v = json_vector(j, field);
  if (static_cast<int>(v.size()) != n) throw ConfigError(field, "expected " + std::to_string(n) + " entries");
  return Eigen::Map<const Vector>(v.data(), n);
}

Matrix to_matrix(const json& j, const std::string& field, int cols) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of rows");
  Matrix m(static_cast<int>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    m.row(static_cast<int>(r)) = to_vector(j[r], field, cols).transpose();
  }
  return m;
}

double number(const json& obj, const std::string& key, const std::string& field, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(field, "expected a number");
  return obj[key].get<double>();
}

Domain parse_domain(const json& j, int n) {
  if (!j.is_object()) throw ConfigError("domain", "expected an object");
  if (!j.contains("type") || !j["type"].is_string()) throw ConfigError("domain.type", "missing (ball or box)");
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "ball") {
      const Vector c = j.contains("center") ? to_vector(j["center"], "domain.center", n) : Vector::Zero(n);
      return Domain::ball(c, number(j, "radius", "domain.radius", 1.0));
    }
    if (type == "box") {
      if (!j.contains("lower") || !j.contains("upper")) {
        throw ConfigError("domain.lower", "box needs lower and upper");
      }
      return Domain::box(to_vector(j["lower"], "domain.lower", n), to_vector(j["upper"], "domain.upper", n));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain", e.what());
  }
  throw ConfigError("domain.type", "unknown domain type '" + type + "'");
}

Domain default_domain(const std::string& kind, int n) {
  if (kind == "quadratic") return Domain::ball(Vector::Zero(n), 1.0);
  if (kind == "logsumexp") return Domain::box(Vector::Constant(n, -1.5), Vector::Constant(n, 1.5));
  return Domain::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
}

Matrix random_spd(int n, std::mt19937_64& rng, double lo, double hi) {
  Matrix g(n, n);
  for (int j = 0; j < n; ++j) g.col(j) = gaussian_vector(n, rng);
  const Matrix v = Eigen::HouseholderQR<Matrix>(g).householderQ();
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector lambda(n);
  for (int i = 0; i < n; ++i) lambda(i) = unif(rng);
  Matrix q = v * lambda.asDiagonal() * v.transpose();
  return 0.5 * (q + q.transpose());
}

}  // namespace

ProblemPtr problem_from_json(const json& spec) {
  if (!spec.is_object()) throw ConfigError("", "problem spec must be a JSON object");
  if (!spec.contains("kind") || !spec["kind"].is_string()) throw ConfigError("kind", "missing problem kind");
  const std::string kind = spec["kind"].get<std::string>();
  if (kind != "quadratic" && kind != "logsumexp" && kind != "smoothed_norm") {
    throw ConfigError("kind", "unknown problem kind '" + kind + "'");
  }
  if (!spec.contains("n") || !spec["n"].is_number_integer()) throw ConfigError("n", "missing integer dimension");
  const int n = spec["n"].get<int>();
  if (n < 2) throw ConfigError("n", "dimension must be >= 2");
  std::uint64_t seed = 0;
  if (spec.contains("seed")) {
    if (!spec["seed"].is_number_unsigned() && !spec["seed"].is_number_integer()) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    seed = spec["seed"].get<std::uint64_t>();
  }
  const Domain domain = spec.contains("domain") ? parse_domain(spec["domain"], n) : default_domain(kind, n);
  const json params = spec.contains("parameters") ? spec["parameters"] : json::object();
  if (!params.is_object()) throw ConfigError("parameters", "expected an object");

  std::mt19937_64 rng(seed);
  const double inner = inner_radius(domain);
  try {
    if (kind == "quadratic") {
      const Matrix q = params.contains("Q") ? to_matrix(params["Q"], "parameters.Q", n) : random_spd(n, rng, 1.0, 10.0);
      if (q.rows() != n) throw ConfigError("parameters.Q", "expected an n x n matrix");
      const Vector xs = params.contains("x_star") ? to_vector(params["x_star"], "parameters.x_star", n)
                                                  : Vector(domain.center + uniform_in_ball(n, 0.5 * inner, rng));
      return make_quadratic(q, xs, domain);
    }
    if (kind == "logsumexp") {
      const double t = number(params, "temperature", "parameters.temperature", 0.5);
      Matrix a;
      if (params.contains("directions")) {
        a = to_matrix(params["directions"], "parameters.directions", n);
      } else {
        a.resize(3 * n, n);
        a.topRows(n) = Matrix::Identity(n, n);
        a.middleRows(n, n) = -Matrix::Identity(n, n);
        for (int i = 0; i < n; ++i) a.row(2 * n + i) = gaussian_vector(n, rng).normalized().transpose();
      }
      Vector b;
      if (params.contains("offsets")) {
        b = to_vector(params["offsets"], "parameters.offsets", static_cast<int>(a.rows()));
      } else if (!params.contains("directions")) {
        std::uniform_real_distribution<double> unif(-0.25, 0.25);
        b.resize(a.rows());
        for (int i = 0; i < b.size(); ++i) b(i) = unif(rng);
      }
      return make_logsumexp(a, t, domain, b);
    }
    const double mu = number(params, "mu", "parameters.mu", 0.1);
    const Vector xs = params.contains("x_star") ? to_vector(params["x_star"], "parameters.x_star", n)
                                                : Vector(domain.center + uniform_in_ball(n, 0.5 * inner, rng));
    return make_smoothed_norm(xs, mu, domain);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("parameters", e.what());
  }
}

ProblemPtr make_suite_problem(const std::string& kind, int n, std::uint64_t seed) {
  return problem_from_json(json{{"kind", kind}, {"n", n}, {"seed", seed}});
}

ValidationReport validate_problem(const ProblemInstance& p, int samples, std::uint64_t seed) {
  ValidationReport rep;
  std::mt19937_64 rng(seed);
  const int n = p.dimension;
  const double h = 1e-5;
  for (int s = 0; s < samples; ++s) {
    const Vector x = p.domain.sample(rng);
    const Vector y = p.domain.sample(rng);
    const Vector g = p.grad(x);
    const double gn = g.norm();
    rep.max_gradient_norm = std::max(rep.max_gradient_norm, gn);
    if (gn > p.lipschitz * (1.0 + 1e-9)) rep.ok = false;

    const double dist2 = (y - x).squaredNorm();
    if (dist2 > 0.0) {
      const double gap = std::abs(p.value(y) - p.value(x) - g.dot(y - x));
      const double ratio = gap / (0.5 * p.smoothness * dist2);
      rep.max_smoothness_ratio = std::max(rep.max_smoothness_ratio, ratio);
      if (gap > 0.5 * p.smoothness * dist2 * (1.0 + 1e-9) + 1e-12) rep.ok = false;
    }

    bool interior = true;
    for (int j = 0; j < n && interior; ++j) {
      const Vector e = h * Vector::Unit(n, j);
      interior = p.domain.contains(x + e) && p.domain.contains(x - e);
    }
    if (interior) {
      Vector fd(n);
      for (int j = 0; j < n; ++j) {
        const Vector e = h * Vector::Unit(n, j);
        fd(j) = (p.value(x + e) - p.value(x - e)) / (2.0 * h);
      }
      const double err = (fd - g).norm() / std::max(1e-6, 1e-4 * gn);
      rep.max_fd_error = std::max(rep.max_fd_error, err);
      if (err > 1.0) rep.ok = false;
    }
    ++rep.samples;
  }
  return rep;
}

}  // namespace subzero
