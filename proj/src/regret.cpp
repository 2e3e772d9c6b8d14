#include "subzero/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subzero/engine.hpp"

namespace subzero {

RegretSchedule regret_schedule(int n, double radius, double lipschitz, const RegretConfig& cfg) {
  if (cfg.horizon < 1) throw ConfigError("T", "horizon must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError("delta", "must lie in (0, 1]");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) throw ConfigError("sigma", "must be >= 0");
  const double nn = static_cast<double>(n);
  const double t = static_cast<double>(cfg.horizon);
  RegretSchedule s;
  s.k = std::max(1LL, static_cast<long long>(
                          std::ceil(8.0 * nn * (nn + 1.0) * std::log(2.0 * radius * lipschitz * std::pow(t, 0.25)))));
  const double levels = std::log(15.0 * t / (2.0 * nn)) / std::log(16.0);
  s.delta_prime = cfg.delta / (4.0 * nn * static_cast<double>(s.k) * levels);
  const double sigma2 = cfg.sigma * cfg.sigma;
  s.tau = std::max(1LL, static_cast<long long>(std::ceil(32.0 * sigma2 * std::pow(nn, 4) * std::log(2.0 / s.delta_prime))));
  s.phase2_repeats = std::max(
      1LL, static_cast<long long>(std::ceil(32.0 * sigma2 * std::sqrt(t) *
                                            std::log(2.0 * (static_cast<double>(s.k) + 1.0) / cfg.delta))));
  return s;
}

double theorem3_bound(const ProblemInstance& problem, const RegretConfig& cfg) {
  const int n = problem.dimension;
  const RegretSchedule s = regret_schedule(n, problem.radius, problem.lipschitz, cfg);
  const double nn = static_cast<double>(n);
  const double t = static_cast<double>(cfg.horizon);
  const double k = static_cast<double>(s.k);
  const double tau = static_cast<double>(s.tau);
  const double r = problem.radius;
  const double l = problem.lipschitz;
  const double beta = problem.smoothness;
  const double phase1 = k * (r * l * tau + 5.0 * std::pow(t, 0.75) * std::pow(nn, -0.25) * std::max(nn * r, 1.0) *
                                               (1.0 + beta) * std::pow(tau, 0.25));
  const double phase2 = (k + 1.0) * static_cast<double>(s.phase2_repeats) * r * l;
  return phase1 + phase2 + std::pow(t, 0.75);
}

namespace {

// Issues queries against the horizon and accumulates ground-truth regret.
class RegretLedger {
 public:
  RegretLedger(const ProblemInstance& problem, OracleHandle& oracle, long long horizon, bool record)
      : problem_(problem), oracle_(oracle), horizon_(horizon), record_(record) {}

  long long remaining() const { return horizon_ - used_; }
  bool exhausted() const { return used_ >= horizon_; }

  /// Queries x up to `count` times (fewer if the horizon ends). Returns the
  /// number of queries made and adds their sum to *sum.
  long long batch(const Vector& x, long long count, long long k, const std::string& phase, double* sum,
                  double log_volume) {
    const long long m = std::min(count, remaining());
    if (m <= 0) return 0;
    double acc = 0.0;
    for (long long q = 0; q < m; ++q) acc += oracle_.query_noisy_value(x);
    used_ += m;
    *sum += acc;
    const double fx = problem_.value(x);
    const double inst = fx - problem_.optimum_value;
    cumulative_ += inst * static_cast<double>(m);
    if (record_) {
      IterationRecord rec;
      rec.k = k;
      rec.phase = phase;
      rec.center = x;
      rec.f_center = fx;
      rec.log_volume = log_volume;
      rec.queries_cumulative = oracle_.query_count();
      rec.instantaneous_regret = inst;
      rec.cumulative_regret = cumulative_;
      records_.push_back(std::move(rec));
    }
    return m;
  }

  double cumulative() const { return cumulative_; }
  std::vector<IterationRecord>& records() { return records_; }

 private:
  const ProblemInstance& problem_;
  OracleHandle& oracle_;
  long long horizon_;
  bool record_;
  long long used_ = 0;
  double cumulative_ = 0.0;
  std::vector<IterationRecord> records_;
};

}  // namespace

RegretResult regret_nv(const ProblemInstance& problem, OracleHandle& oracle, const RegretConfig& cfg) {
  if (oracle.kind() != OracleKind::NoisyValue) {
    throw std::invalid_argument("regret_nv: expected a noisy-value oracle");
  }
  const int n = problem.dimension;
  const double nn = static_cast<double>(n);
  const double beta = problem.smoothness;
  RegretResult out;
  out.schedule = regret_schedule(n, problem.radius, problem.lipschitz, cfg);
  const RegretSchedule& s = out.schedule;
  const long long minimal = (n + 1LL) * s.tau;
  if (cfg.horizon < minimal) {
    throw ConfigError("T", "horizon too small for one Phase-1 level; need T >= " + std::to_string(minimal));
  }

  SolverConfig engine_cfg;
  engine_cfg.eps = std::pow(static_cast<double>(cfg.horizon), -0.25);
  engine_cfg.record_trace = false;
  EllipsoidEngine eng(problem, oracle, engine_cfg, "regret-nv");
  RegretLedger ledger(problem, oracle, cfg.horizon, cfg.record_trace);
  const long long start_queries = oracle.query_count();
  auto probe_radius = [n](const Ellipsoid& e) {
    const double r = std::sqrt(e.lambda_max());
    return std::min(r, 1.0) / (2.0 * n * r);
  };

  std::vector<Vector> centers;
  bool phase1_done = false;
  for (long long k = 1; k <= s.k && !ledger.exhausted(); ++k) {
    eng.ensure_feasible(probe_radius);
    const IsotropicTransform t = isotropic(eng.ellipsoid());
    centers.push_back(t.center);
    const double lambda = t.scale * t.scale;
    const double log_volume = eng.ellipsoid().log_volume();
    const double d = std::min(t.scale, 1.0) / (2.0 * nn);
    const double delta = d * (2.0 + beta * lambda) / (2.0 * lambda);
    const Vector true_grad = t.to_original_direction(problem.grad(t.center));
    bool cut = false;
    for (int i = 0; !cut && !ledger.exhausted(); ++i) {
      RegretRound round;
      round.k = k;
      round.i = i;
      round.d_i = std::ldexp(d, -i);
      round.delta_i = std::ldexp(delta, -i);
      const double scale = std::pow(16.0, i);
      round.tau_i = scale * static_cast<double>(s.tau) > 4e18 ? std::numeric_limits<long long>::max() / 2
                                                              : static_cast<long long>(scale) * s.tau;
      double sum0 = 0.0;
      long long got = ledger.batch(t.center, round.tau_i, k, "phase1", &sum0, log_volume);
      bool full = got == round.tau_i;
      const double mean0 = sum0 / static_cast<double>(std::max(got, 1LL));
      Vector p(n);
      for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        const Vector xj = t.inverse(round.d_i * Vector::Unit(n, j));
        const long long m = ledger.batch(xj, round.tau_i, k, "phase1", &sum, log_volume);
        full = full && m == round.tau_i;
        p(j) = m > 0 ? (sum / static_cast<double>(m) - mean0) / round.d_i : 0.0;
      }
      round.complete = full;
      round.p_norm = p.norm();
      round.grad_error = (p - true_grad).norm();
      round.true_grad_norm = true_grad.norm();
      const double width = std::sqrt(nn) * round.delta_i;
      if (full && round.p_norm > width && width / round.p_norm <= 1.0 / (2.0 * nn)) {
        round.case_taken = 1;
        eng.cut(k, t, p, 1.0 / (2.0 * nn));
        ++out.cuts;
        cut = true;
      }
      out.rounds.push_back(round);
    }
    if (k == s.k && cut) phase1_done = true;
  }

  if (!phase1_done) {
    out.point = centers.empty() ? eng.ellipsoid().center : centers.back();
    out.complete = false;
  } else {
    eng.ensure_feasible(0.0);
    centers.push_back(eng.ellipsoid().center);
    const double log_volume = eng.ellipsoid().log_volume();
    out.point = centers.back();
    double best_mean = std::numeric_limits<double>::infinity();
    bool phase2_done = true;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      double sum = 0.0;
      const long long m = ledger.batch(centers[c], s.phase2_repeats, s.k + 1, "phase2", &sum, log_volume);
      if (m < s.phase2_repeats) phase2_done = false;
      if (m == 0) break;
      const double mean = sum / static_cast<double>(m);
      if (mean < best_mean) {
        best_mean = mean;
        out.point = centers[c];
      }
    }
    out.complete = phase2_done;
    double sum = 0.0;
    ledger.batch(out.point, ledger.remaining(), s.k + 2, "phase3", &sum, log_volume);
  }

  out.cumulative_regret = ledger.cumulative();
  out.trace = eng.finish(out.complete ? "completed" : "budget_exhausted");
  out.trace.records = std::move(ledger.records());
  out.trace.total_queries = oracle.query_count() - start_queries;
  out.trace.planned_iterations = s.k;
  return out;
}

ProblemPtr beta_rescale(const ProblemInstance& problem) {
  if (!(problem.smoothness > 0.0)) throw std::invalid_argument("beta_rescale: beta must be > 0");
  const double c = std::sqrt(problem.smoothness);
  auto p = std::make_shared<ProblemInstance>(problem);
  const auto f = problem.objective;
  const auto g = problem.gradient;
  p->objective = [f, c](const Vector& y) { return f(y / c); };
  p->gradient = [g, c](const Vector& y) -> Vector { return g(y / c) / c; };
  if (problem.domain.kind == Domain::Kind::Ball) {
    p->domain = Domain::ball(c * problem.domain.center, c * problem.domain.radius);
  } else {
    p->domain = Domain::box(c * problem.domain.lower, c * problem.domain.upper);
  }
  p->lipschitz = problem.lipschitz / c;
  p->smoothness = 1.0;
  p->radius = c * problem.radius;
  p->optimum_point = c * problem.optimum_point;
  p->provenance = problem.provenance + "; rescaled by sqrt(beta)";
  return p;
}

}  // namespace subzero
