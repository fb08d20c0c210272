"""Trigonometric polynomial potentials and the geometry of their Fourier support."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from sympy.polys.domains.domain import Domain

from . import scalars
from .phasepoly import PhasePolynomial, kinetic_energy
from .quadext import Frequency, QuadExt, cross3, det2, det3, qext_sign


class PotentialError(ValueError):
    pass


class Potential:
    """``V(q) = sum_k a_k exp(k.q)`` with exact frequencies and parameter coefficients.

    The coefficient field is ``QQ(params)``; frequencies may live in one
    quadratic field ``Q(sqrt(radicand))``.
    """

    __slots__ = ("n", "domain", "terms", "radicand")

    def __init__(self, n: int, terms: Mapping[Any, Any] | Iterable[tuple[Any, Any]] = (), params: Sequence[str] = (), domain: Domain | None = None):
        if n < 1:
            raise PotentialError("dimension must be positive")
        K = domain if domain is not None else scalars.coefficient_domain(tuple(params))
        if scalars.domain_radicand(K) != 1:
            raise PotentialError("potential coefficients must not contain radicals")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Frequency, Any] = {}
        radicand = 1
        for k, c in items:
            f = Frequency(k)
            if len(f) != n:
                raise PotentialError(f"frequency {f!r} does not have dimension {n}")
            if f.is_zero():
                raise PotentialError("the zero frequency (constant term) is not allowed")
            r = f.radicand
            if r != 1:
                if radicand not in (1, r):
                    raise PotentialError(f"radicand mismatch: {radicand} vs {r}")
                radicand = r
            v = scalars.parse_scalar(c, K) if isinstance(c, str) else scalars.convert(K, c)
            clean[f] = clean[f] + v if f in clean else v
        self.n = n
        self.domain = K
        self.terms = {f: c for f, c in clean.items() if c}
        self.radicand = radicand

    @property
    def params(self) -> tuple[str, ...]:
        return scalars.domain_params(self.domain)

    def support(self) -> set[Frequency]:
        return set(self.terms)

    def sorted_support(self) -> list[Frequency]:
        return sorted(self.terms, key=Frequency.sort_key)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Potential):
            return NotImplemented
        return self.n == other.n and self.params == other.params and self.terms == other.terms

    def __repr__(self) -> str:
        body = " + ".join(f"({scalars.format_scalar(self.domain, self.terms[k])})*exp{k!r}" for k in self.sorted_support())
        return f"Potential(n={self.n}, {body or '0'})"

    def restrict(self, keys: Iterable[Frequency]) -> "Potential":
        return Potential(self.n, {k: self.terms[k] for k in keys}, domain=self.domain)

    def as_phase_polynomial(self) -> PhasePolynomial:
        return PhasePolynomial(self.n, self.domain, {((0,) * self.n, k): c for k, c in self.terms.items()})

    def hamiltonian(self) -> PhasePolynomial:
        """``1/2 |p|^2 + V`` in the real normal form."""
        return kinetic_energy(self.n, self.domain) + self.as_phase_polynomial()


def support(V: Potential) -> set[Frequency]:
    return V.support()


# ---------------------------------------------------------------------------
# convex hulls


@dataclass(frozen=True)
class HullReport:
    """Exact convex hull of a support.  ``edges``/``faces`` index into ``summits``."""

    summits: tuple[Frequency, ...]
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[int, ...], ...] = ()
    contains_origin: bool = False
    affine_dimension: int = 0
    points: tuple[Frequency, ...] = field(default=(), repr=False)

    def edge_pairs(self) -> list[tuple[Frequency, Frequency]]:
        return [(self.summits[i], self.summits[j]) for i, j in self.edges]


def _orient2(a: Sequence[QuadExt], b: Sequence[QuadExt], c: Sequence[QuadExt]) -> int:
    return qext_sign(det2([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]))


def _between(a: Frequency, b: Frequency, x: Frequency) -> bool:
    """``x`` on the closed segment ``[a, b]``, given collinearity."""
    return all(min(p, q) <= r <= max(p, q) for p, q, r in zip(a, b, x))


def _affine_rank(points: Sequence[Frequency]) -> int:
    base = points[0]
    vecs = [p.minus(base) for p in points[1:]]
    vecs = [v for v in vecs if not v.is_zero()]
    if not vecs:
        return 0
    u = vecs[0]
    w = next((v for v in vecs if not _parallel(u, v)), None)
    if w is None:
        return 1
    if len(u) < 3:
        return 2
    nrm = cross3(u, w)
    if any(qext_sign(nrm.dot(v)) for v in vecs):
        return 3
    return 2


def _parallel(u: Sequence[QuadExt], v: Sequence[QuadExt]) -> bool:
    n = len(u)
    return all(not (u[i] * v[j] - u[j] * v[i]) for i in range(n) for j in range(i + 1, n))


def _segment_hull(points: Sequence[Frequency]) -> tuple[list[Frequency], bool]:
    """Extremes of collinear points and whether the origin lies on the segment."""
    pts = sorted(set(points), key=tuple)
    lo, hi = pts[0], pts[-1]
    if lo == hi:
        return [lo], lo.is_zero()
    origin = Frequency.zero(len(lo))
    on_line = _parallel(hi.minus(lo), origin.minus(lo))
    return [lo, hi], on_line and _between(lo, hi, origin)


def _monotone_chain(points: Sequence[Frequency]) -> list[Frequency]:
    """Counterclockwise extreme points of a planar set (collinear points dropped)."""
    pts = sorted(set(points), key=lambda p: (p[0], p[1]))
    if len(pts) <= 2:
        return pts

    def half(seq: Iterable[Frequency]) -> list[Frequency]:
        chain: list[Frequency] = []
        for p in seq:
            while len(chain) >= 2 and _orient2(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _planar_hull_3d(points: Sequence[Frequency], normal: Frequency) -> list[Frequency]:
    """Gift wrapping inside a plane of R^3; counterclockwise seen from ``normal``."""
    pts = sorted(set(points), key=tuple)
    if len(pts) <= 2:
        return pts

    def orient(a: Frequency, b: Frequency, c: Frequency) -> int:
        return qext_sign(det3(b.minus(a), c.minus(a), normal))

    start = pts[0]
    hull = [start]
    cur = start
    while True:
        cand = pts[0] if pts[0] != cur else pts[1]
        for p in pts:
            if p == cur or p == cand:
                continue
            s = orient(cur, cand, p)
            if s < 0 or (s == 0 and p.minus(cur).norm2() > cand.minus(cur).norm2()):
                cand = p
        if cand == start:
            break
        hull.append(cand)
        cur = cand
        if len(hull) > len(pts):
            raise RuntimeError("gift wrapping did not close")
    return hull


def hull_of_points(points: Iterable[Frequency], n: int) -> HullReport:
    pts = sorted(set(Frequency(p) for p in points), key=Frequency.sort_key)
    if n not in (1, 2, 3):
        raise PotentialError(f"convex hulls are supported in dimension 1-3, not {n}")
    if not pts:
        return HullReport((), (), (), False, -1, ())
    origin = Frequency.zero(n)
    rank = _affine_rank(pts)
    if rank <= 1:
        summits, has0 = _segment_hull(pts)
        edges = ((0, 1),) if len(summits) == 2 else ()
        return HullReport(tuple(summits), edges, (), has0, rank, tuple(pts))
    if n == 2:
        ring = _monotone_chain(pts)
        m = len(ring)
        has0 = all(_orient2(ring[i], ring[(i + 1) % m], origin) >= 0 for i in range(m))
        edges = tuple((i, (i + 1) % m) for i in range(m))
        return HullReport(tuple(ring), edges, (tuple(range(m)),), has0, 2, tuple(pts))
    if rank == 2:
        base = pts[0]
        u = next(p.minus(base) for p in pts if p != base)
        w = next(p.minus(base) for p in pts if not _parallel(u, p.minus(base)))
        normal = cross3(u, w)
        ring = _planar_hull_3d(pts, normal)
        m = len(ring)
        in_plane = not qext_sign(normal.dot(origin.minus(base)))
        has0 = in_plane and all(
            qext_sign(det3(ring[(i + 1) % m].minus(ring[i]), origin.minus(ring[i]), normal)) >= 0 for i in range(m)
        )
        edges = tuple((i, (i + 1) % m) for i in range(m))
        return HullReport(tuple(ring), edges, (tuple(range(m)),), has0, 2, tuple(pts))
    return _hull3(pts)


def _hull3(pts: list[Frequency]) -> HullReport:
    """Full-dimensional hull in R^3 by enumerating supporting planes."""
    origin = Frequency.zero(3)
    planes: dict[frozenset[int], Frequency] = {}
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        a = pts[i]
        nrm = cross3(pts[j].minus(a), pts[k].minus(a))
        if nrm.is_zero():
            continue
        signs = [qext_sign(nrm.dot(p.minus(a))) for p in pts]
        if any(s > 0 for s in signs) and any(s < 0 for s in signs):
            continue
        if any(s > 0 for s in signs):
            nrm = nrm.negated()
        on = frozenset(idx for idx, s in enumerate(signs) if s == 0)
        planes.setdefault(on, nrm)
    rings = []
    for on, nrm in sorted(planes.items(), key=lambda kv: sorted(kv[0])):
        rings.append(_planar_hull_3d([pts[i] for i in on], nrm))
    summit_set = sorted({p for r in rings for p in r}, key=Frequency.sort_key)
    index = {p: i for i, p in enumerate(summit_set)}
    faces = []
    edges = set()
    for r in rings:
        face = tuple(index[p] for p in r)
        faces.append(face)
        for a, b in zip(face, face[1:] + face[:1]):
            edges.add((min(a, b), max(a, b)))
    has0 = all(
        qext_sign(nrm.dot(origin.minus(pts[min(on)]))) <= 0 for on, nrm in planes.items()
    )
    return HullReport(tuple(summit_set), tuple(sorted(edges)), tuple(faces), has0, 3, tuple(pts))


def convex_hull(V: Potential) -> HullReport:
    return hull_of_points(V.support(), V.n)


def inside_or_on(report: HullReport, k: Frequency) -> bool:
    """Exact membership of ``k`` in the hull (used to audit reports)."""
    return hull_of_points(list(report.summits) + [k], len(k)).summits == report.summits


# ---------------------------------------------------------------------------


def limit_potential(V: Potential, v: Sequence[Any]) -> Potential:
    """Sub-potential of the terms maximizing ``k.v``."""
    v = Frequency(v)
    if len(v) != V.n:
        raise PotentialError("direction has the wrong dimension")
    if v.is_zero():
        raise PotentialError("limit direction must be non-zero")
    if not V.terms:
        return V
    dots = {k: k.dot(v) for k in V.terms}
    best = max(dots.values())
    return V.restrict(k for k, d in dots.items() if d == best)


def apply_isometry(V: Potential, M: Sequence[Sequence[Any]], scale: Any = 1) -> Potential:
    """Replace every frequency ``k`` by ``scale * M k``; ``M`` must be exactly orthogonal."""
    n = V.n
    M = [[QuadExt.coerce(x) for x in row] for row in M]
    if len(M) != n or any(len(r) != n for r in M):
        raise PotentialError("isometry matrix has the wrong shape")
    for i in range(n):
        for j in range(n):
            s = sum((M[r][i] * M[r][j] for r in range(n)), QuadExt(0))
            if s != (1 if i == j else 0):
                raise PotentialError("matrix is not orthogonal")
    c = QuadExt.coerce(scale)
    if qext_sign(c) <= 0:
        raise PotentialError("scale must be positive")
    out = {}
    for k, a in V.terms.items():
        out[Frequency(c * sum((M[i][j] * k[j] for j in range(n)), QuadExt(0)) for i in range(n))] = a
    return Potential(n, out, domain=V.domain)


def is_real_potential(V: Potential) -> bool:
    """Conjugacy condition ``conj(a_k) = a_{-k}`` for parameter-free rational coefficients."""
    for c in V.terms.values():
        if not scalars.is_constant(V.domain, c):
            raise PotentialError("reality test needs numeric coefficients")
    for k, c in V.terms.items():
        other = V.terms.get(k.negated())
        if other is None or other != c:
            return False
    return True


@dataclass(frozen=True)
class SeparabilityWitness:
    """Orthogonal lines carrying the support, with a rotation onto the axes if exact."""

    lines: tuple[Frequency, ...]
    matrix: tuple[tuple[QuadExt, ...], ...] | None

    @property
    def representable(self) -> bool:
        return self.matrix is not None


def _unit(v: Frequency) -> Frequency | None:
    r = v.norm2()
    s = QuadExt.sqrt_of(r.a) if r.is_rational else r.sqrt()
    if s is None:
        return None
    try:
        return v.scaled(s.inverse())
    except ValueError:
        return None


def _complete_basis(units: list[Frequency], n: int) -> list[Frequency] | None:
    rows = list(units)
    try:
        if n == 2 and len(rows) == 1:
            u = rows[0]
            rows.append(Frequency([-u[1], u[0]]))
        elif n == 3 and len(rows) == 2:
            rows.append(cross3(rows[0], rows[1]))
        elif n == 3 and len(rows) == 1:
            u = rows[0]
            for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]):
                w = cross3(u, Frequency(e))
                if w.is_zero():
                    continue
                wu = _unit(w)
                if wu is not None:
                    rows += [wu, cross3(u, wu)]
                    break
            else:
                return None
    except ValueError:
        return None
    return rows if len(rows) == n else None


def separability_witness(V: Potential) -> SeparabilityWitness | None:
    """Lines through the origin carrying the support, if they are <= n and pairwise orthogonal."""
    if V.n > 3:
        raise PotentialError("separability test is implemented up to dimension 3")
    lines: list[Frequency] = []
    for k in V.sorted_support():
        if not any(_parallel(k, l) for l in lines):
            lines.append(k)
    if len(lines) > V.n:
        return None
    for a, b in itertools.combinations(lines, 2):
        if a.dot(b):
            return None
    # order lines by the axis they are closest to, so axis-aligned inputs give the identity
    lines.sort(key=lambda l: max(range(V.n), key=lambda i: abs(float(l[i])) - 1e-12 * i))
    units = [_unit(l) for l in lines]
    if any(u is None for u in units):
        return SeparabilityWitness(tuple(lines), None)
    units = [_orient(u) for u in units]
    rows = _complete_basis(units, V.n)
    if rows is None:
        return SeparabilityWitness(tuple(lines), None)
    rows = _arrange(rows, V.n)
    return SeparabilityWitness(tuple(lines), tuple(tuple(r) for r in rows))


def _orient(u: Frequency) -> Frequency:
    """Flip ``u`` so its first non-zero coordinate is positive."""
    for c in u:
        s = qext_sign(c)
        if s:
            return u if s > 0 else u.negated()
    return u


def _arrange(rows: list[Frequency], n: int) -> list[Frequency]:
    """Permute rows toward a dominant diagonal and fix the determinant to +1."""
    best = max(itertools.permutations(range(n)), key=lambda perm: sum(abs(float(rows[perm[i]][i])) for i in range(n)))
    rows = [_orient(rows[i]) for i in best]
    det = det2(rows[0], rows[1]) if n == 2 else det3(*rows) if n == 3 else rows[0][0]
    if qext_sign(det) < 0:
        rows[-1] = rows[-1].negated()
    return rows

