"""Inflection-point caustic wavefield: steepest-descent quadrature, exact
field evaluation, asymptotic regime formulas, and a marching cross-check."""

from .quadrature import (
    ContourEndpoint,
    IntegrandSpec,
    PolyPhase,
    QuadResult,
    integrate,
)

__version__ = "0.1.0"

__all__ = [
    "PolyPhase",
    "ContourEndpoint",
    "IntegrandSpec",
    "QuadResult",
    "integrate",
    "__version__",
]
