"""Random batch method for parabolic problems on metric graphs."""

from ._core import (
    CSV_HEADER,
    GraphRbmError,
    MetricGraph,
    Problem,
    Scheme,
    build_graph,
    check,
    demo_graph,
    demo_problem,
    fit_slope,
    lambda_profile,
    load_graph,
    load_problem,
    rbm,
    solve,
    study,
)

__all__ = [
    "CSV_HEADER",
    "GraphRbmError",
    "MetricGraph",
    "Problem",
    "Scheme",
    "build_graph",
    "check",
    "demo_graph",
    "demo_problem",
    "fit_slope",
    "lambda_profile",
    "load_graph",
    "load_problem",
    "rbm",
    "solve",
    "study",
]
