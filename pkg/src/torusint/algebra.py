"""Exact scalars and the phase-space polynomial ring.

The implementation is split over :mod:`quadext` (numbers ``a + b sqrt(d)``
and frequency vectors), :mod:`scalars` (rational functions in named
parameters), :mod:`phasepoly` (the ring and its bracket) and :mod:`linalg`
(fraction-free elimination).  This module gathers the public names.
"""

from .linalg import nullspace, rank, solve
from .phasepoly import (
    DimensionError,
    PhasePolynomial,
    evaluate_numeric,
    from_sympy,
    kinetic_energy,
    poisson_bracket,
    realify,
    to_sympy,
)
from .quadext import Frequency, QuadExt, common_radicand, qext_sign
from .scalars import ScalarError, coefficient_domain, format_scalar, merge_domains, parse_scalar

__all__ = [
    "DimensionError",
    "Frequency",
    "PhasePolynomial",
    "QuadExt",
    "ScalarError",
    "coefficient_domain",
    "common_radicand",
    "evaluate_numeric",
    "format_scalar",
    "from_sympy",
    "kinetic_energy",
    "merge_domains",
    "nullspace",
    "parse_scalar",
    "poisson_bracket",
    "qext_sign",
    "rank",
    "realify",
    "solve",
    "to_sympy",
]
