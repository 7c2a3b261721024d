"""Parallel Gauss-Seidel stencil sweeps: strategies, tracing and verification."""

from ._stencillab import (
    STENCILS,
    STRATEGIES,
    ConfigError,
    Mesh,
    NumericalError,
    StallError,
    colour_of,
    residual,
    run,
    sweep,
    sweeps_to_converge,
    trace,
    verify,
)

__all__ = [
    "STENCILS",
    "STRATEGIES",
    "ConfigError",
    "Mesh",
    "NumericalError",
    "StallError",
    "colour_of",
    "residual",
    "run",
    "sweep",
    "sweeps_to_converge",
    "trace",
    "verify",
]
