"""Fixture potentials, Hamiltonians and first integrals.

``H1``..``H8`` are the integrable Hamiltonians in real normal form
``|p|^2/2 + V`` with real exponentials.  ``R1``..``R3`` are the two-term
edge Hamiltonians carried by the rational torus parametrizations, converted
to the real normal form by :func:`realify`.  ``COR2_*`` are the parametric
integrable families and ``EQ1`` the screening counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .integral_search import default_frequency_set, new_integrals, search_first_integrals
from .phasepoly import PhasePolynomial, from_sympy, realify
from .potential import Potential
from .quadext import QuadExt
from .scalars import to_fraction

SQRT3 = QuadExt(0, 1, 3)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    potential: Potential
    integrals: tuple[PhasePolynomial, ...]
    note: str = ""
    degrees: tuple[int, ...] = field(default=())

    @property
    def hamiltonian(self) -> PhasePolynomial:
        return self.integrals[0]

    @property
    def params(self) -> tuple[str, ...]:
        return self.potential.params


# ---------------------------------------------------------------------------
# potentials in the real normal form

POTENTIALS: dict[str, Potential] = {
    "H1": Potential(2, {(2, 0): 1, (-1, SQRT3): 1, (-1, -SQRT3): 1}),
    "H2": Potential(2, {(2, 0): 1, (0, 2): 1, (-2, -2): 1, (-1, -1): "alpha"}, params=("alpha",)),
    "H3": Potential(2, {(2, 0): 1, (0, 2): 1, (-1, -1): 1, (1, 0): "alpha", (0, 1): "beta"}, params=("alpha", "beta")),
    "H4": Potential(2, {(2, 0): 1, (0, 2 * SQRT3): 1, (-1, -SQRT3): 1}),
    "H5": Potential(2, {(2 * SQRT3, 0): 1, (0, 2): 1, (-SQRT3, -3): 1}),
    "H6": Potential(3, {(1, 1, 0): 1, (0, -1, 1): 1, (0, -1, -1): 1, (-1, 1, 0): 1}),
    "H7": Potential(
        3,
        {(2, 0, 0): 1, (-1, 1, 0): 1, (0, -1, -1): 1, (0, -1, 1): 1, (1, 0, 0): "alpha"},
        params=("alpha",),
    ),
    "H8": Potential(
        3,
        {(2, 0, 0): 1, (-1, 1, 0): 1, (0, -1, 1): 1, (0, 0, -2): 1, (1, 0, 0): "alpha", (0, 0, -1): "beta"},
        params=("alpha", "beta"),
    ),
}

I6 = "p1*p2*p3 - p3*(exp(-q1+q2) - exp(q1+q2)) - p1*(exp(-q2+q3) - exp(-q2-q3))"
J6 = """p1**4 + p2**4 + p3**4 + 4*p3**2*(exp(-q2-q3) + exp(-q2+q3)) - 4*p2*p3*(-exp(-q2+q3) + exp(-q2-q3))
 + 4*p2**2*(exp(-q2-q3) + exp(-q1+q2) + exp(q1+q2) + exp(-q2+q3)) + 4*p1*p2*(exp(-q1+q2) - exp(q1+q2))
 + 4*p1**2*(exp(-q1+q2) + exp(q1+q2)) + 4*exp(q1+q3) + 4*exp(q1-q3) + 4*exp(-q1+q3) + 4*exp(-q1-q3)
 + 2*exp(2*q1+2*q2) + 2*exp(-2*q1+2*q2) + 2*exp(-2*q2-2*q3) + 2*exp(-2*q2+2*q3) + 12*exp(2*q2) + 12*exp(-2*q2)"""
# the first bracket uses exp(q1); a stray i there breaks commutation
I7 = """p1**4 + p2**4 + p3**4 + (4*alpha*exp(q1) + 4*exp(2*q1) + 4*exp(-q1+q2))*p1**2 + 4*p1*p2*exp(-q1+q2)
 + (4*exp(-q1+q2) + 4*exp(-q2+q3) + 4*exp(-q2-q3))*p2**2 + (4*exp(-q2+q3) - 4*exp(-q2-q3))*p3*p2
 + (4*exp(-q2+q3) + 4*exp(-q2-q3))*p3**2 + 4*alpha**2*exp(2*q1) + 4*alpha*exp(q2) + 8*alpha*exp(3*q1)
 + 2*exp(-2*q1+2*q2) + 2*exp(-2*q2-2*q3) + 2*exp(-2*q2+2*q3) + 8*exp(q1+q2) + 4*exp(-q1+q3)
 + 4*exp(-q1-q3) + 12*exp(-2*q2) + 4*exp(4*q1)"""
J7 = """p1**2*p2**2*p3**2 + p1**2*p2*p3*(2*exp(-q2-q3) - 2*exp(-q2+q3)) - 2*p1*p2*p3**2*exp(-q1+q2)
 + p2**2*p3**2*(2*alpha*exp(q1) + 2*exp(2*q1)) + p1**2*(exp(-2*q2+2*q3) + exp(-2*q2-2*q3) - 2*exp(-2*q2))
 + p1*p3*(2*exp(-q1+q3) - 2*exp(-q1-q3))
 + p2*p3*(4*alpha*exp(q1-q2-q3) + 4*exp(2*q1-q2-q3) - 4*alpha*exp(q1-q2+q3) - 4*exp(2*q1-q2+q3))
 + p3**2*(exp(-2*q1+2*q2) + 2*alpha*exp(q2)) + 2*alpha*exp(q3) + 2*alpha*exp(-q3)
 + 2*alpha*exp(q1-2*q2+2*q3) + 2*alpha*exp(q1-2*q2-2*q3) - 4*alpha*exp(q1-2*q2) - 4*exp(2*q1-2*q2)
 + 2*exp(2*q1-2*q2+2*q3) + 2*exp(2*q1-2*q2-2*q3)"""
I8 = """p1**4 + p2**4 + p3**4 + p1**2*(4*alpha*exp(q1) + 4*exp(2*q1) - 2*beta**2 + 4*exp(q2-q1))
 + 4*p1*p2*exp(q2-q1) + p2**2*(4*exp(q2-q1) - 2*beta**2 + 4*exp(q3-q2)) + 4*p2*p3*exp(-q2+q3)
 + p3**2*(4*exp(-2*q3) - 2*beta**2 + 4*exp(-q2+q3) + 4*beta*exp(-q3)) - 4*alpha*beta**2*exp(q1)
 - 4*beta**3*exp(-q3) + 4*alpha**2*exp(2*q1) - 4*exp(2*q1)*beta**2 - 4*beta**2*exp(-q1+q2)
 - 4*beta**2*exp(-q2+q3) + 4*alpha*exp(q2) + 8*beta*exp(-3*q3) + 8*alpha*exp(3*q1) + 4*beta*exp(-q2)
 + 4*exp(4*q1) + 4*exp(-4*q3) + 2*exp(-2*q1+2*q2) + 2*exp(-2*q2+2*q3) + 8*exp(q1+q2)
 + 8*exp(-q2-q3) + 4*exp(-q1+q3)"""
J8 = """p1**2*p2**2*p3**2 + (2*beta*exp(-q3) + 2*exp(-2*q3))*p2**2*p1**2 - 2*p2*p3*p1**2*exp(-q2+q3)
 - 2*p1*p2*p3**2*exp(-q1+q2) + (2*alpha*exp(q1) + 2*exp(2*q1))*p3**2*p2**2
 + (2*beta*exp(-q2) + exp(-2*q2+2*q3))*p1**2 - (4*exp(-q1+q2-q3)*beta + 4*exp(-q1+q2-2*q3))*p2*p1
 + 2*exp(-q1+q3)*p3*p1
 + (4*exp(q1-q3)*alpha*beta + 4*exp(2*q1-q3)*beta + 4*exp(q1-2*q3)*alpha + 4*exp(2*q1-2*q3))*p2**2
 - (4*exp(q1-q2+q3)*alpha + 4*exp(2*q1-q2+q3))*p3*p2 + (2*alpha*exp(q2) + exp(-2*q1+2*q2))*p3**2
 + 4*alpha*beta*exp(q1-q2) + 4*alpha*beta*exp(q2-q3) + 2*alpha*exp(q3) + 2*beta*exp(-q1)
 + 4*alpha*exp(q2-2*q3) + 4*beta*exp(2*q1-q2) + 2*beta*exp(-2*q1+2*q2-q3)
 + 2*alpha*exp(q1-2*q2+2*q3) + 2*exp(2*q1-2*q2+2*q3) + 2*exp(-2*q1+2*q2-2*q3)"""

_TRANSCRIBED = {"H6": (I6, J6), "H7": (I7, J7), "H8": (I8, J8)}

# two-term edge Hamiltonians in the complex form exp(i k.q), with their integrals
RATIONAL_CASES = {
    "R1": (
        "(p1**2 + p2**2)/2 + exp(q1 + sqrt(3)*q2) + exp(q1 - sqrt(3)*q2)",
        "p2**3 - 3*p2*p1**2 + 3*sqrt(3)*(exp(q1 - sqrt(3)*q2) - exp(q1 + sqrt(3)*q2))*p1"
        " + 3*(exp(q1 + sqrt(3)*q2) + exp(q1 - sqrt(3)*q2))*p2",
        3,
    ),
    "R2": (
        "(p1**2 + p2**2)/2 + exp(q1) + exp(q2 - q1)",
        "p1**2*p2**2 + 2*p2**2*exp(q1) - 2*p1*p2*exp(q2 - q1) + 2*exp(q2) + exp(2*(q2 - q1))",
        1,
    ),
    "R3": (
        "(p1**2 + p2**2)/2 + exp(2*sqrt(3)*q1) + exp(-sqrt(3)*q1 - q2)",
        """-p1**6 + 6*p2**2*p1**4 - 9*p2**4*p1**2 - 6*(exp(2*sqrt(3)*q1) + exp(-sqrt(3)*q1 - q2))*p1**4
 + 6*sqrt(3)*exp(-sqrt(3)*q1 - q2)*p2*p1**3 + (24*exp(2*sqrt(3)*q1) + 18*exp(-sqrt(3)*q1 - q2))*p2**2*p1**2
 - 18*sqrt(3)*exp(-sqrt(3)*q1 - q2)*p2**3*p1 - 18*exp(2*sqrt(3)*q1)*p2**4
 + 6*sqrt(3)*(3*exp(-2*(sqrt(3)*q1 + q2)) + 2*exp(sqrt(3)*q1 - q2))*p2*p1
 - 3*(3*exp(-2*(sqrt(3)*q1 + q2)) + 8*exp(sqrt(3)*q1 - q2) + 4*exp(4*sqrt(3)*q1))*p1**2
 + (-27*exp(-2*(sqrt(3)*q1 + q2)) + 36*exp(sqrt(3)*q1 - q2) + 24*exp(4*sqrt(3)*q1))*p2**2
 - 8*exp(6*sqrt(3)*q1) - 24*exp(3*sqrt(3)*q1 - q2)""",
        3,
    ),
}


@lru_cache(maxsize=None)
def transcribed_integrals(cid: str) -> tuple[PhasePolynomial, ...]:
    V = POTENTIALS[cid]
    H = V.hamiltonian()
    return (H,) + tuple(from_sympy(s, V.n, V.params, V.radicand) for s in _TRANSCRIBED[cid])


@lru_cache(maxsize=None)
def rational_case(cid: str) -> tuple[PhasePolynomial, PhasePolynomial]:
    """``(H, I)`` of a two-term edge case in the real normal form."""
    h, i, d = RATIONAL_CASES[cid]
    return realify(from_sympy(h, 2, (), d)), realify(from_sympy(i, 2, (), d))


def rational_case_potential(cid: str) -> Potential:
    """The potential of the real-form Hamiltonian (coefficients -1)."""
    H, _ = rational_case(cid)
    return Potential(2, {f: to_fraction(H.domain, c) for (a, f), c in H.terms.items() if not f.is_zero()})


# degree of the extra integral found by the direct search, per id
SEARCH_DEGREES = {"H1": 3, "H2": 4, "H3": 4, "H4": 6, "H5": 6}


@lru_cache(maxsize=None)
def searched_integral(cid: str) -> PhasePolynomial:
    """The extra first integral of H1..H5 from the direct search at ``m = D // 2``."""
    V = POTENTIALS[cid]
    D = SEARCH_DEGREES[cid]
    basis = search_first_integrals(V, D, default_frequency_set(V, D // 2))
    extra = new_integrals(basis)
    if not extra:
        raise ArithmeticError(f"no extra integral of degree {D} for {cid}")
    return max(extra, key=lambda P: P.momentum_degree())


@lru_cache(maxsize=None)
def entry(cid: str) -> CatalogEntry:
    V = POTENTIALS[cid]
    if cid in _TRANSCRIBED:
        Fs = transcribed_integrals(cid)
        note = "integrals transcribed verbatim"
    else:
        Fs = (V.hamiltonian(), searched_integral(cid))
        note = f"extra integral from the degree-{SEARCH_DEGREES[cid]} direct search"
    return CatalogEntry(cid, V, Fs, note, tuple(F.momentum_degree() for F in Fs))


def catalog_ids() -> list[str]:
    return list(POTENTIALS)


# ---------------------------------------------------------------------------
# screening fixtures (complex form; the stored k are the same)

COR2_DIM2 = {
    "C2a": Potential(2, {(2, 0): "a", (-1, SQRT3): "b", (-1, -SQRT3): "c"}, params=("a", "b", "c")),
    "C2b": Potential(2, {(2, 0): "a", (0, 2): "b", (-2, -2): "c", (-1, -1): "d"}, params=("a", "b", "c", "d")),
    "C2c": Potential(
        2, {(2, 0): "a", (1, 0): "b", (0, 2): "c", (0, 1): "d", (-1, -1): "e"}, params=("a", "b", "c", "d", "e")
    ),
    "C2d": Potential(2, {(2, 0): "a", (0, 2 * SQRT3): "b", (-1, -SQRT3): "c"}, params=("a", "b", "c")),
    "C2e": Potential(2, {(2 * SQRT3, 0): "a", (0, 2): "b", (-SQRT3, -3): "c"}, params=("a", "b", "c")),
}

COR2_DIM3 = {
    "C3a": Potential(
        3, {(1, 1, 0): "a", (0, -1, 1): "b", (0, -1, -1): "c", (-1, 1, 0): "d"}, params=("a", "b", "c", "d")
    ),
    "C3b": Potential(
        3,
        {(2, 0, 0): "a", (-1, 1, 0): "b", (0, -1, -1): "c", (0, -1, 1): "d", (1, 0, 0): "e"},
        params=("a", "b", "c", "d", "e"),
    ),
    "C3c": Potential(
        3,
        {(2, 0, 0): "a", (-1, 1, 0): "b", (0, -1, 1): "c", (0, 0, -2): "d", (1, 0, 0): "e", (0, 0, -1): "f"},
        params=("a", "b", "c", "d", "e", "f"),
    ),
}

SEPARABLE = {
    "S2": Potential(2, {(1, 0): 1, (-1, 0): 1, (0, 1): 1}),
    "S2b": Potential(2, {(1, 0): "a", (2, 0): "b", (0, -3): "c", (0, 1): "d"}, params=("a", "b", "c", "d")),
    "S3": Potential(3, {(1, 0, 0): 1, (0, -2, 0): 1, (0, 0, 1): 1, (0, 0, -1): 1}),
    "PS3": Potential(
        3, {(2, 0, 0): "a", (-1, SQRT3, 0): "b", (-1, -SQRT3, 0): "c", (0, 0, 1): "d", (0, 0, -2): "e"},
        params=("a", "b", "c", "d", "e"),
    ),
    "PS3b": Potential(
        3, {(2, 0, 0): "a", (0, 2, 0): "b", (-2, -2, 0): "c", (-1, -1, 0): "d", (0, 0, 1): "e"},
        params=("a", "b", "c", "d", "e"),
    ),
}

# the fourth term is kept in its original form
EQ1 = Potential(
    2,
    {(6, 0): "a", (4, 0): "b", (2, 0): "c", (2 * SQRT3, 0): "d", (-3, -SQRT3): "e"},
    params=("a", "b", "c", "d", "e"),
)


def screening_fixtures() -> dict[str, Potential]:
    out: dict[str, Potential] = {}
    out.update(COR2_DIM2)
    out.update(COR2_DIM3)
    out.update(SEPARABLE)
    return out
