#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subzero/bench.hpp"
#include "subzero/geometry.hpp"
#include "subzero/oracles.hpp"
#include "subzero/problems.hpp"
#include "subzero/pruning.hpp"
#include "subzero/regret.hpp"
#include "subzero/solvers.hpp"

namespace py = pybind11;
using namespace subzero;

namespace {

// Python-side handle to an immutable problem instance.
struct Problem {
  ProblemPtr ptr;
};

OracleKind parse_kind(const std::string& s) {
  if (s == "dp") return OracleKind::DirectionalPreference;
  if (s == "comparator") return OracleKind::Comparator;
  if (s == "value") return OracleKind::Value;
  if (s == "noisy_value") return OracleKind::NoisyValue;
  throw py::value_error("unknown oracle kind: " + s);
}

py::dict trace_to_dict(const RunTrace& t) {
  py::list records;
  for (const auto& r : t.records) {
    py::dict d;
    d["k"] = r.k;
    d["phase"] = r.phase;
    d["center"] = r.center;
    d["f_center"] = r.f_center;
    d["log_volume"] = r.log_volume;
    d["queries_cumulative"] = r.queries_cumulative;
    d["cone_angle"] = r.cone_angle;
    d["degenerate"] = r.degenerate;
    d["instantaneous_regret"] = r.instantaneous_regret;
    d["cumulative_regret"] = r.cumulative_regret;
    records.append(d);
  }
  py::dict out;
  out["solver"] = t.solver;
  out["records"] = records;
  out["iterations"] = t.iterations;
  out["planned_iterations"] = t.planned_iterations;
  out["feasibility_cuts"] = t.feasibility_cuts;
  out["total_queries"] = t.total_queries;
  out["stop_reason"] = t.stop_reason;
  out["optimum_value"] = t.optimum_value;
  return out;
}

py::dict solve_to_dict(const Problem& p, const SolveResult& r) {
  py::dict out;
  out["point"] = r.point;
  out["suboptimality"] = p.ptr->value(r.point) - p.ptr->optimum_value;
  out["trace"] = trace_to_dict(r.trace);
  return out;
}

SolverConfig solver_config(double eps, std::optional<long long> max_iterations, bool record_trace) {
  SolverConfig cfg;
  cfg.eps = eps;
  cfg.max_iterations = max_iterations;
  cfg.record_trace = record_trace;
  return cfg;
}

template <typename Fn>
py::dict run_solver(Fn fn, OracleKind kind, const Problem& p, double eps, std::uint64_t seed,
                    std::optional<long long> max_iterations, bool record_trace) {
  OracleHandle oracle(kind, p.ptr, 0.0, seed);
  const SolveResult r = fn(*p.ptr, oracle, solver_config(eps, max_iterations, record_trace));
  return solve_to_dict(p, r);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ellipsoid-method optimizers driven by sign, comparison and noisy-value oracles";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InfeasibleQueryError>(m, "InfeasibleQueryError", m.attr("Error"));
  py::register_exception<BudgetExhaustedError>(m, "BudgetExhaustedError", m.attr("Error"));
  py::register_exception<DegenerateEllipsoidError>(m, "DegenerateEllipsoidError", m.attr("Error"));
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));
  py::register_exception<AssumptionError>(m, "AssumptionError", m.attr("Error"));

  py::class_<Ellipsoid>(m, "Ellipsoid")
      .def(py::init<Matrix, Vector>(), py::arg("shape"), py::arg("center"))
      .def_readonly("shape", &Ellipsoid::shape)
      .def_readonly("center", &Ellipsoid::center)
      .def("membership", &Ellipsoid::membership)
      .def("contains", &Ellipsoid::contains, py::arg("x"), py::arg("tol") = 1e-9)
      .def("lambda_max", &Ellipsoid::lambda_max)
      .def("lambda_min", &Ellipsoid::lambda_min)
      .def("log_volume", &Ellipsoid::log_volume);

  m.def("shallow_cut_volume_ratio", &shallow_cut_volume_ratio, py::arg("n"), py::arg("theta"));
  m.def("shallow_cut", py::overload_cast<const Ellipsoid&, const Vector&, double>(&shallow_cut),
        py::arg("ellipsoid"), py::arg("g_iso"), py::arg("sin_theta"));
  m.def("halfspace_cut", &halfspace_cut, py::arg("ellipsoid"), py::arg("normal"), py::arg("alpha"));
  m.def(
      "cone_prune_geometry",
      [](double gamma, const std::vector<int>& signs, const std::vector<Vector>& basis) {
        const Cone c = cone_prune_geometry(gamma, signs, basis);
        return py::make_tuple(c.direction, c.semi_vertical_angle);
      },
      py::arg("gamma"), py::arg("signs"), py::arg("basis"));

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("kind", [](const Problem& p) { return p.ptr->kind; })
      .def_property_readonly("dimension", [](const Problem& p) { return p.ptr->dimension; })
      .def_property_readonly("lipschitz", [](const Problem& p) { return p.ptr->lipschitz; })
      .def_property_readonly("smoothness", [](const Problem& p) { return p.ptr->smoothness; })
      .def_property_readonly("radius", [](const Problem& p) { return p.ptr->radius; })
      .def_property_readonly("optimum_value", [](const Problem& p) { return p.ptr->optimum_value; })
      .def_property_readonly("optimum_point", [](const Problem& p) { return p.ptr->optimum_point; })
      .def_property_readonly("provenance", [](const Problem& p) { return p.ptr->provenance; })
      .def("value", [](const Problem& p, const Vector& x) { return p.ptr->value(x); })
      .def("grad", [](const Problem& p, const Vector& x) { return p.ptr->grad(x); })
      .def("contains", [](const Problem& p, const Vector& x) { return p.ptr->domain.contains(x); });

  m.def(
      "make_quadratic",
      [](const Matrix& q, const Vector& x_star, const Vector& center, double radius) {
        return Problem{make_quadratic(q, x_star, Domain::ball(center, radius))};
      },
      py::arg("q"), py::arg("x_star"), py::arg("center"), py::arg("radius"));
  m.def(
      "make_logsumexp",
      [](const Matrix& directions, double temperature, const Vector& lower, const Vector& upper,
         const Vector& offsets) {
        return Problem{make_logsumexp(directions, temperature, Domain::box(lower, upper), offsets)};
      },
      py::arg("directions"), py::arg("temperature"), py::arg("lower"), py::arg("upper"),
      py::arg("offsets") = Vector());
  m.def(
      "make_smoothed_norm",
      [](const Vector& x_star, double mu, const Vector& lower, const Vector& upper) {
        return Problem{make_smoothed_norm(x_star, mu, Domain::box(lower, upper))};
      },
      py::arg("x_star"), py::arg("mu"), py::arg("lower"), py::arg("upper"));
  m.def(
      "make_suite_problem",
      [](const std::string& kind, int n, std::uint64_t seed) { return Problem{make_suite_problem(kind, n, seed)}; },
      py::arg("kind"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "problem_from_json",
      [](const std::string& text) { return Problem{problem_from_json(nlohmann::json::parse(text))}; },
      py::arg("spec"));
  m.def(
      "check_interior", [](const Problem& p, double eps) { check_interior(*p.ptr, eps); }, py::arg("problem"),
      py::arg("eps"));

  py::class_<OracleHandle>(m, "Oracle")
      .def(py::init([](const std::string& kind, const Problem& p, double sigma, std::uint64_t seed,
                       std::optional<long long> budget) {
             return OracleHandle(parse_kind(kind), p.ptr, sigma, seed, budget);
           }),
           py::arg("kind"), py::arg("problem"), py::arg("sigma") = 0.0, py::arg("seed") = 0,
           py::arg("budget") = py::none())
      .def("query_dp", &OracleHandle::query_dp, py::arg("x"), py::arg("y"))
      .def("query_comparator", &OracleHandle::query_comparator, py::arg("x"), py::arg("y"))
      .def("query_value", &OracleHandle::query_value, py::arg("x"))
      .def("query_noisy_value", &OracleHandle::query_noisy_value, py::arg("x"))
      .def_property_readonly("query_count", &OracleHandle::query_count);

  m.def(
      "optimize_dp",
      [](const Problem& p, double eps, std::uint64_t seed, std::optional<long long> max_iterations, bool trace) {
        return run_solver(optimize_dp, OracleKind::DirectionalPreference, p, eps, seed, max_iterations, trace);
      },
      py::arg("problem"), py::arg("eps"), py::arg("seed") = 0, py::arg("max_iterations") = py::none(),
      py::arg("record_trace") = true);
  m.def(
      "optimize_c",
      [](const Problem& p, double eps, std::uint64_t seed, std::optional<long long> max_iterations, bool trace) {
        return run_solver(optimize_c, OracleKind::Comparator, p, eps, seed, max_iterations, trace);
      },
      py::arg("problem"), py::arg("eps"), py::arg("seed") = 0, py::arg("max_iterations") = py::none(),
      py::arg("record_trace") = true);
  m.def(
      "optimize_v",
      [](const Problem& p, double eps, std::uint64_t seed, std::optional<long long> max_iterations, bool trace) {
        return run_solver(optimize_v, OracleKind::Value, p, eps, seed, max_iterations, trace);
      },
      py::arg("problem"), py::arg("eps"), py::arg("seed") = 0, py::arg("max_iterations") = py::none(),
      py::arg("record_trace") = true);

  m.def(
      "regret_nv",
      [](const Problem& p, long long horizon, double delta, double sigma, std::uint64_t seed, bool trace) {
        OracleHandle oracle(OracleKind::NoisyValue, p.ptr, sigma, seed);
        RegretConfig cfg{horizon, delta, sigma, trace};
        const RegretResult r = regret_nv(*p.ptr, oracle, cfg);
        py::dict out;
        out["point"] = r.point;
        out["suboptimality"] = p.ptr->value(r.point) - p.ptr->optimum_value;
        out["cumulative_regret"] = r.cumulative_regret;
        out["bound"] = theorem3_bound(*p.ptr, cfg);
        out["complete"] = r.complete;
        out["cuts"] = r.cuts;
        out["total_queries"] = r.trace.total_queries;
        out["trace"] = trace_to_dict(r.trace);
        return out;
      },
      py::arg("problem"), py::arg("horizon"), py::arg("delta") = 0.1, py::arg("sigma") = 0.0, py::arg("seed") = 0,
      py::arg("record_trace") = true);
  m.def(
      "theorem3_bound",
      [](const Problem& p, long long horizon, double delta, double sigma) {
        return theorem3_bound(*p.ptr, RegretConfig{horizon, delta, sigma, false});
      },
      py::arg("problem"), py::arg("horizon"), py::arg("delta") = 0.1, py::arg("sigma") = 0.0);

  m.def("iterations_dp", &iterations_dp, py::arg("n"), py::arg("radius"), py::arg("lipschitz"), py::arg("eps"));
  m.def("iterations_c", &iterations_c, py::arg("n"), py::arg("radius"), py::arg("lipschitz"), py::arg("eps"));
  m.def("query_bound_dp", &query_bound_dp, py::arg("n"), py::arg("radius"), py::arg("lipschitz"), py::arg("eps"),
        py::arg("k"));
  m.def("query_bound_c", &query_bound_c, py::arg("n"), py::arg("k"));
  m.def("query_bound_v", &query_bound_v, py::arg("n"), py::arg("k"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& format) {
        const bench::ExperimentConfig cfg = bench::experiment_from_json(nlohmann::json::parse(config_json));
        return bench::render(bench::run(cfg), format);
      },
      py::arg("config"), py::arg("format") = "csv");
}
