#include "subzero/engine.hpp"

#include <algorithm>
#include <sstream>

namespace subzero {

EllipsoidEngine::EllipsoidEngine(const ProblemInstance& problem, OracleHandle& oracle, const SolverConfig& cfg,
                                 std::string solver)
    : problem_(problem), oracle_(oracle), cfg_(cfg), ellipsoid_(initial_ellipsoid(problem.domain)) {
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw std::invalid_argument("solver: eps must be > 0");
  if (problem.dimension < 2) throw std::invalid_argument("solver: dimension must be >= 2");
  trace_.solver = std::move(solver);
  trace_.optimum_value = problem.optimum_value;
}

int EllipsoidEngine::ensure_feasible(const std::function<double(const Ellipsoid&)>& rho) {
  const double n = static_cast<double>(ellipsoid_.dim());
  int cuts = 0;
  for (;;) {
    const double r = rho(ellipsoid_);
    const auto h = problem_.domain.separate(ellipsoid_, r);
    if (!h) return cuts;
    if (trace_.feasibility_cuts >= kMaxFeasibilityCuts) {
      std::ostringstream msg;
      msg << "feasibility cuts did not converge after " << kMaxFeasibilityCuts
          << " cuts (center [" << ellipsoid_.center.transpose() << "])";
      throw DegenerateEllipsoidError(msg.str());
    }
    const double q = std::sqrt(h->normal.dot(ellipsoid_.shape * h->normal));
    double alpha = (h->normal.dot(ellipsoid_.center) - h->offset) / q;
    alpha = std::clamp(alpha, -1.0 / n, 0.0);
    ellipsoid_ = halfspace_cut(ellipsoid_, h->normal, alpha);
    ++trace_.feasibility_cuts;
    ++cuts;
    if (cfg_.record_trace) record(current_k_, "feasibility", std::nullopt, false);
  }
}

void EllipsoidEngine::cut(long long k, const IsotropicTransform& t, const Vector& g_iso, double sin_theta) {
  Ellipsoid next;
  try {
    next = shallow_cut(ellipsoid_, t, g_iso, sin_theta);
  } catch (const DegenerateEllipsoidError& e) {
    std::ostringstream msg;
    msg << trace_.solver << ": ellipsoid degenerated at iteration " << k << " (lambda_max "
        << ellipsoid_.lambda_max() << ", lambda_min " << ellipsoid_.lambda_min() << "): " << e.what();
    throw DegenerateEllipsoidError(msg.str());
  }
  if (cfg_.observer) {
    CutEvent ev;
    ev.k = k;
    ev.before = &ellipsoid_;
    ev.transform = &t;
    ev.direction = g_iso;
    ev.sin_theta = sin_theta;
    ev.after = &next;
    cfg_.observer(ev);
  }
  ellipsoid_ = std::move(next);
  ++trace_.iterations;
  current_k_ = k + 1;
}

void EllipsoidEngine::record(long long k, const std::string& phase, std::optional<double> cone_angle,
                             bool degenerate, const Vector* point) {
  current_k_ = std::max(current_k_, k);
  if (!cfg_.record_trace) return;
  IterationRecord rec;
  rec.k = k;
  rec.phase = phase;
  rec.center = point ? *point : ellipsoid_.center;
  rec.f_center = problem_.value(rec.center);
  rec.log_volume = ellipsoid_.log_volume();
  rec.queries_cumulative = oracle_.query_count();
  rec.cone_angle = cone_angle;
  rec.degenerate = degenerate;
  trace_.records.push_back(std::move(rec));
}

RunTrace EllipsoidEngine::finish(const std::string& stop_reason) {
  trace_.stop_reason = stop_reason;
  trace_.total_queries = oracle_.query_count();
  return std::move(trace_);
}

}  // namespace subzero
