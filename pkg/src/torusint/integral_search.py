"""Direct-method search for polynomial first integrals and independence certificates."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np
import sympy
from sympy.matrices.normalforms import hermite_normal_form

from . import linalg, scalars
from .phasepoly import PhasePolynomial, poisson_bracket
from .potential import Potential
from .quadext import Frequency, QuadExt


class AnsatzClosureError(ValueError):
    """The bracket with H left the key space the linear system was built for."""

    def __init__(self, key: tuple[tuple[int, ...], Frequency], message: str = ""):
        super().__init__(message or f"bracket produced monomial outside the ansatz: p^{key[0]} exp{key[1]!r}")
        self.key = key


def default_frequency_set(V: Potential, m: int) -> set[Frequency]:
    """All sums of at most ``m`` support elements (with repetition), plus 0."""
    if m < 1:
        raise ValueError("m must be at least 1")
    zero = Frequency.zero(V.n)
    out = {zero}
    layer = {zero}
    supp = V.sorted_support()
    for _ in range(m):
        layer = {f.plus(k) for f in layer for k in supp}
        out |= layer
    return out


def momentum_exponents(n: int, D: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= D, graded then lexicographic."""
    out = []
    for d in range(D + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=lambda e: (sum(e), tuple(-x for x in e)))


@dataclass(frozen=True)
class AnsatzDescriptor:
    """Monomials ``p^a exp(f.q)`` with ``|a| <= D`` and ``f`` in ``F``."""

    n: int
    D: int
    F: tuple[Frequency, ...]
    basis: tuple[tuple[tuple[int, ...], Frequency], ...]

    @classmethod
    def build(cls, n: int, D: int, F: Iterable[Sequence[Any]]) -> "AnsatzDescriptor":
        freqs = sorted({Frequency(f) for f in F}, key=Frequency.sort_key)
        if any(len(f) != n for f in freqs):
            raise ValueError("frequency dimension mismatch")
        exps = momentum_exponents(n, D)
        basis = [(a, f) for f in freqs for a in exps]
        return cls(n, D, tuple(freqs), tuple(basis))

    def __len__(self) -> int:
        return len(self.basis)


@dataclass
class IntegralBasis:
    descriptor: AnsatzDescriptor
    hamiltonian: PhasePolynomial
    elements: list[PhasePolynomial]

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def verify(self) -> bool:
        return all(poisson_bracket(self.hamiltonian, F).is_zero() for F in self.elements)


def search_first_integrals(
    V: Potential,
    D: int,
    F: Iterable[Sequence[Any]],
) -> IntegralBasis:
    """Echelon basis of ``{F in ansatz : {H, F} = 0}`` for ``H = |p|^2/2 + V``."""
    H = V.hamiltonian()
    K = H.domain
    desc = AnsatzDescriptor.build(V.n, D, F)
    allowed_shift = {Frequency.zero(V.n)} | V.support()
    fset = set(desc.F)
    rows: dict[tuple[tuple[int, ...], Frequency], dict[int, Any]] = {}
    for j, (a, f) in enumerate(desc.basis):
        mono = PhasePolynomial(V.n, K, {(a, f): K.one})
        br = poisson_bracket(H, mono)
        for key, c in br.terms.items():
            pexp, g = key
            if sum(pexp) > D + 1 or not any(g.minus(s) in fset for s in allowed_shift):
                raise AnsatzClosureError(key)
            rows.setdefault(key, {})[j] = c
    ordered = [rows[k] for k in sorted(rows, key=lambda k: (k[0], k[1].sort_key()))]
    kernel = linalg.nullspace(ordered, len(desc.basis), K)
    elements = []
    for vec in kernel:
        elements.append(PhasePolynomial(V.n, K, {desc.basis[j]: c for j, c in vec.items()}))
    elements.sort(key=lambda P: (P.momentum_degree(), len(P)))
    basis = IntegralBasis(desc, H, elements)
    if not basis.verify():
        raise ArithmeticError("kernel element failed the post-hoc bracket check")
    return basis


def coefficient_rank(polys: Sequence[PhasePolynomial]) -> int:
    """Rank of the span of ``polys`` over their coefficient field."""
    if not polys:
        return 0
    K = polys[0].domain
    for P in polys[1:]:
        K = scalars.merge_domains(K, P.domain)
    keys: dict = {}
    rows = []
    for P in polys:
        P = P.with_domain(K)
        rows.append({keys.setdefault(k, len(keys)): c for k, c in P.terms.items()})
    return linalg.rank(rows, len(keys), K)


def extend_span(known: Sequence[PhasePolynomial], candidates: Sequence[PhasePolynomial]) -> list[PhasePolynomial]:
    """Candidates that enlarge the span of ``known``, chosen greedily in order."""
    chosen: list[PhasePolynomial] = []
    base = list(known)
    r = coefficient_rank(base)
    for P in candidates:
        r2 = coefficient_rank(base + [P])
        if r2 > r:
            base.append(P)
            chosen.append(P)
            r = r2
    return chosen


def new_integrals(basis: IntegralBasis) -> list[PhasePolynomial]:
    """Kernel elements outside the span of the constants and powers of H."""
    H = basis.hamiltonian
    D = basis.descriptor.D
    powers = [H**k for k in range(D // 2 + 1)]
    return extend_span(powers, basis.elements)


# ---------------------------------------------------------------------------
# commutation and independence


@dataclass
class Certificate:
    commuting: bool
    independent: bool
    failing_pair: tuple[int, int] | None
    ranks: list[int]
    required: int
    method: str
    lattice_rank: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.commuting and self.independent


def frequency_lattice(freqs: Iterable[Frequency], n: int) -> tuple[list[Frequency], dict[Frequency, tuple[int, ...]]]:
    """A Z-basis of the group generated by ``freqs`` and integer coordinates of each frequency."""
    freqs = sorted(set(freqs), key=Frequency.sort_key)
    nonzero = [f for f in freqs if not f.is_zero()]
    d = 1
    for f in nonzero:
        if f.radicand != 1:
            d = f.radicand
    coords = [[x for c in f for x in (c.a, c.b)] for f in nonzero]
    if not coords:
        return [], {f: () for f in freqs}
    den = 1
    for row in coords:
        for x in row:
            den = den * x.denominator // np.gcd(den, x.denominator)
    M = sympy.Matrix([[int(x * den) for x in row] for row in coords]).T
    Hm = hermite_normal_form(M)
    cols = [Hm[:, j] for j in range(Hm.shape[1]) if any(Hm[:, j])]
    B = sympy.Matrix.hstack(*cols)
    basis = []
    for j in range(B.shape[1]):
        col = [Fraction(int(B[i, j]), den) for i in range(B.shape[0])]
        basis.append(Frequency(QuadExt(col[2 * i], col[2 * i + 1], d) for i in range(n)))
    out: dict[Frequency, tuple[int, ...]] = {}
    for f, row in zip(nonzero, coords):
        rhs = sympy.Matrix([int(x * den) for x in row])
        sol, params = B.gauss_jordan_solve(rhs)
        if params.shape[0] or any(not v.is_integer for v in sol):
            raise ArithmeticError("lattice coordinates are not integral")
        out[f] = tuple(int(v) for v in sol)
    for f in freqs:
        if f.is_zero():
            out[f] = (0,) * len(basis)
    return basis, out


def _random_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        q = rng.randint(1, 7)
        x = Fraction(rng.randint(-10 * q, 10 * q), q)
        if x or not nonzero:
            return x


def _exact_jacobian_rank(Fs: Sequence[PhasePolynomial], basis: list[Frequency], coords: dict, rng: random.Random) -> int:
    n = Fs[0].n
    K = Fs[0].domain
    r = len(basis)
    p = [_random_rational(rng) for _ in range(n)]
    E = [_random_rational(rng, nonzero=True) for _ in range(r)]
    pK = [scalars.convert(K, x) for x in p]
    EK = [scalars.convert(K, x) for x in E]
    rows = []
    for F in Fs:
        row: dict[int, Any] = {}
        for (a, f), c in F.terms.items():
            cf = coords[f]
            mono = c
            for x, e in zip(EK, cf):
                mono = mono * (x**e if e >= 0 else K.one / x ** (-e))
            pm = mono
            for x, e in zip(pK, a):
                if e:
                    pm = pm * x**e
            for i in range(n):
                if a[i]:
                    t = mono * a[i]
                    for k, (x, e) in enumerate(zip(pK, a)):
                        e = e - 1 if k == i else e
                        if e:
                            t = t * x**e
                    row[i] = row.get(i, K.zero) + t
            for j in range(r):
                if cf[j]:
                    row[n + j] = row.get(n + j, K.zero) + pm * cf[j] / EK[j]
        rows.append(row)
    return linalg.rank(rows, n + r, K)


def _float_jacobian_rank(Fs: Sequence[PhasePolynomial], rng: random.Random, params: dict[str, float]) -> int:
    n = Fs[0].n
    J = []
    p = np.array([float(_random_rational(rng)) / 5 for _ in range(n)])
    q = np.array([float(_random_rational(rng)) / 10 for _ in range(n)])
    for F in Fs:
        rowp = [F.diff_p(i).compile(params)(p, q) for i in range(n)]
        rowq = [F.diff_q(i).compile(params)(p, q) for i in range(n)]
        J.append(rowp + rowq)
    s = np.linalg.svd(np.array(J, dtype=float), compute_uv=False)
    return int(np.sum(s > 1e-9 * max(s[0], 1.0)))


def check_commuting_independent(Fs: Sequence[PhasePolynomial], seed: int = 0, trials: int = 3) -> Certificate:
    """Exact pairwise commutation plus a randomized exact Jacobian rank test.

    The rank is taken with respect to ``(p, E)`` where ``E_j = exp(b_j . q)``
    for a Z-basis ``b`` of the frequency lattice, at seeded random rational
    points.  A full rank at any point certifies independence.
    """
    if not Fs:
        raise ValueError("empty list")
    n = Fs[0].n
    K = Fs[0].domain
    for F in Fs[1:]:
        K = scalars.merge_domains(K, F.domain)
    Fs = [F.with_domain(K) for F in Fs]
    rng = random.Random(seed)
    for i, j in itertools.combinations(range(len(Fs)), 2):
        if not poisson_bracket(Fs[i], Fs[j]).is_zero():
            return Certificate(False, False, (i, j), [], len(Fs), "bracket")
    freqs = set().union(*(F.frequencies() for F in Fs))
    basis, coords = frequency_lattice(freqs, n)
    ranks = []
    if len(basis) <= n:
        for _ in range(max(trials, 1)):
            ranks.append(_exact_jacobian_rank(Fs, basis, coords, rng))
        method = "exact"
    else:
        params = {name: float(_random_rational(rng, nonzero=True)) for name in scalars.domain_params(K)}
        for _ in range(max(trials, 1)):
            ranks.append(_float_jacobian_rank(Fs, rng, params))
        method = "float-svd"
    return Certificate(True, max(ranks) == len(Fs), None, ranks, len(Fs), method, len(basis))
