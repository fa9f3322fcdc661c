"""Constructive Galerkin solver for -Δv = λ v^q + f(v), v = 0 on the boundary."""

from ._core import (
    ConfigError,
    Domain,
    MonotonicityError,
    Nonlinearity,
    Problem,
    SpectralSpace,
    StraussApprox,
    approx_problem,
    certificate,
    limit_problem,
    pipeline,
    reference,
    run_command,
    solve,
    sphere_check,
)

__all__ = [
    "ConfigError",
    "Domain",
    "MonotonicityError",
    "Nonlinearity",
    "Problem",
    "SpectralSpace",
    "StraussApprox",
    "approx_problem",
    "certificate",
    "limit_problem",
    "pipeline",
    "reference",
    "run_command",
    "solve",
    "sphere_check",
]
