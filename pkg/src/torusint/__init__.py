"""Integrability tools for exponential and trigonometric potentials on flat tori."""

from .expfield import ExpFieldFunction, integrate_in_field, weighted_measure
from .integral_search import check_commuting_independent, default_frequency_set, search_first_integrals
from .phasepoly import PhasePolynomial, evaluate_numeric, poisson_bracket
from .potential import Potential, convex_hull, limit_potential, separability_witness
from .quadext import Frequency, QuadExt, qext_sign
from .screening import enumerate_two_term_pairs, eqtre_member, screen

__version__ = "0.1.0"

__all__ = [
    "ExpFieldFunction",
    "Frequency",
    "PhasePolynomial",
    "Potential",
    "QuadExt",
    "check_commuting_independent",
    "convex_hull",
    "default_frequency_set",
    "enumerate_two_term_pairs",
    "eqtre_member",
    "evaluate_numeric",
    "integrate_in_field",
    "limit_potential",
    "poisson_bracket",
    "qext_sign",
    "screen",
    "search_first_integrals",
    "separability_witness",
    "weighted_measure",
]
