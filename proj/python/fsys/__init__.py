"""Analysis of one-dimensional first-order symmetric positive systems."""

from ._core import (
    DomainError,
    NumericsError,
    Problem,
    SchemaError,
    analyze_json,
    bundled_names,
    check_symmetry,
    endpoint_inertias,
    estimate_mu0,
    graph_codimension,
    kernel_dimensions,
    load_bundled,
    load_problem,
    numerical_kernel,
    parse_problem,
    solve_manufactured,
)

__all__ = [
    "DomainError",
    "NumericsError",
    "Problem",
    "SchemaError",
    "analyze_json",
    "bundled_names",
    "check_symmetry",
    "endpoint_inertias",
    "estimate_mu0",
    "graph_codimension",
    "kernel_dimensions",
    "load_bundled",
    "load_problem",
    "numerical_kernel",
    "parse_problem",
    "solve_manufactured",
]
