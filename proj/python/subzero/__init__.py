from ._core import (
    AssumptionError,
    BudgetExhaustedError,
    ConfigError,
    DegenerateEllipsoidError,
    Ellipsoid,
    Error,
    InfeasibleQueryError,
    Oracle,
    Problem,
    check_interior,
    cone_prune_geometry,
    halfspace_cut,
    iterations_c,
    iterations_dp,
    make_logsumexp,
    make_quadratic,
    make_smoothed_norm,
    make_suite_problem,
    optimize_c,
    optimize_dp,
    optimize_v,
    problem_from_json,
    query_bound_c,
    query_bound_dp,
    query_bound_v,
    regret_nv,
    run_experiment,
    shallow_cut,
    shallow_cut_volume_ratio,
    theorem3_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
