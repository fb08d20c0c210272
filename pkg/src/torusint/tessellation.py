"""Circle coverings and maximal sphere tessellations with admissible edge lengths.

Lengths and areas are rational multiples of pi held as ``Fraction``.  Corner
angles are irrational multiples of pi, so the gluing search uses 50-digit
mpmath values, rounded to floats for the 1e-9 angle-sum tests.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
import sympy

ARC_LENGTHS = (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(5, 6), Fraction(1))
EDGE_LENGTHS = ARC_LENGTHS[:-1]
ANGLE_TOL = 1e-9
MAX_PIECES = 8

# squared norm ratios forced across an edge of the given length (condition 3)
NORM_RATIOS = {
    Fraction(2, 3): (Fraction(1),),
    Fraction(3, 4): (Fraction(2), Fraction(1, 2)),
    Fraction(5, 6): (Fraction(3), Fraction(1, 3)),
}


def _pi_label(x: Fraction) -> str:
    if x == 1:
        return "pi"
    num = "pi" if x.numerator == 1 else f"{x.numerator}pi"
    return num if x.denominator == 1 else f"{num}/{x.denominator}"


# ---------------------------------------------------------------------------
# dimension 2


@dataclass(frozen=True)
class ArcMultiset:
    arcs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        arcs = tuple(sorted((Fraction(a) for a in self.arcs), reverse=True))
        if any(a not in ARC_LENGTHS for a in arcs):
            raise ValueError(f"inadmissible arc in {arcs}")
        if sum(arcs, Fraction(0)) > 2:
            raise ValueError("arcs exceed the full circle")
        object.__setattr__(self, "arcs", arcs)

    @property
    def total(self) -> Fraction:
        return sum(self.arcs, Fraction(0))

    @property
    def is_covering(self) -> bool:
        return self.total == 2

    def contains(self, other: "ArcMultiset") -> bool:
        return not (Counter(other.arcs) - Counter(self.arcs))

    def __str__(self) -> str:
        return "{" + ", ".join(_pi_label(a) for a in self.arcs) + "}"


def circle_coverings() -> list[ArcMultiset]:
    """Multisets of admissible arcs summing to exactly 2 pi."""
    out = []
    max_arcs = int(2 / min(ARC_LENGTHS))
    for k in range(1, max_arcs + 1):
        for combo in itertools.combinations_with_replacement(ARC_LENGTHS, k):
            if sum(combo, Fraction(0)) == 2:
                out.append(ArcMultiset(combo))
    return sorted(set(out), key=lambda c: (len(c.arcs), tuple(-a for a in c.arcs)))


def complete_partial_covering(partial: ArcMultiset) -> list[ArcMultiset]:
    if partial.total >= 1:
        raise ValueError("partial covering must be shorter than pi")
    return [c for c in circle_coverings() if c.contains(partial)]


# ---------------------------------------------------------------------------
# spherical triangles


def _corner_angles(a: mpmath.mpf, b: mpmath.mpf, c: mpmath.mpf) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """Angles opposite the sides ``a, b, c`` by the spherical law of cosines."""

    def opp(x, y, z):
        return mpmath.acos((mpmath.cos(x) - mpmath.cos(y) * mpmath.cos(z)) / (mpmath.sin(y) * mpmath.sin(z)))

    return opp(a, b, c), opp(b, c, a), opp(c, a, b)


def spherical_excess(edges: Sequence[Fraction], dps: int = 50) -> mpmath.mpf:
    with mpmath.workdps(dps):
        a, b, c = (mpmath.pi * mpmath.mpf(e.numerator) / e.denominator for e in edges)
        return sum(_corner_angles(a, b, c)) - mpmath.pi


def _recognize_area(edges: Sequence[Fraction]) -> Fraction:
    with mpmath.workdps(60):
        ratio = spherical_excess(edges, 60) / mpmath.pi
        guess = Fraction(str(mpmath.nstr(ratio, 40))).limit_denominator(24)
        if abs(ratio - mpmath.mpf(guess.numerator) / guess.denominator) > mpmath.mpf(10) ** -40:
            raise ArithmeticError(f"area of {edges} is not a small rational multiple of pi")
    return guess


@dataclass(frozen=True)
class SphericalTriangle:
    id: str
    edges: tuple[Fraction, Fraction, Fraction]
    area: Fraction

    @property
    def corners(self) -> tuple[float, float, float]:
        """Corner angles, the i-th opposite ``edges[i]``, as fractions of pi."""
        return _corners(self.edges)

    def __str__(self) -> str:
        return f"{self.id}({', '.join(_pi_label(e) for e in self.edges)})"


@lru_cache(maxsize=None)
def _corners(edges: tuple[Fraction, ...]) -> tuple[float, float, float]:
    with mpmath.workdps(50):
        a, b, c = (mpmath.pi * mpmath.mpf(e.numerator) / e.denominator for e in edges)
        return tuple(float(x / mpmath.pi) for x in _corner_angles(a, b, c))


def enumerate_admissible_triangles() -> list[SphericalTriangle]:
    """Triangles with perimeter < 2 pi; ids follow increasing area."""
    found = []
    for tri in itertools.combinations_with_replacement(EDGE_LENGTHS, 3):
        a, b, c = tri
        if a + b + c >= 2 or not (a < b + c and b < a + c and c < a + b):
            continue
        found.append((_recognize_area(tri), tri))
    found.sort()
    return [SphericalTriangle(f"P{i + 1}", tri, area) for i, (area, tri) in enumerate(found)]


@lru_cache(maxsize=None)
def _pieces() -> dict[str, SphericalTriangle]:
    return {t.id: t for t in enumerate_admissible_triangles()}


@dataclass(frozen=True)
class TriangleMultiset:
    pieces: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(sorted(self.pieces, key=lambda s: int(s[1:]))))

    @classmethod
    def parse(cls, text: str) -> "TriangleMultiset":
        """Accepts ``P1,P1,P5`` or the power notation ``P1^2,P5``."""
        out = []
        for tok in text.replace("[", "").replace("]", "").split(","):
            tok = tok.strip()
            if not tok:
                continue
            name, _, k = tok.partition("^")
            out += [name] * int(k or 1)
        return cls(tuple(out))

    @property
    def area(self) -> Fraction:
        tris = _pieces()
        return sum((tris[p].area for p in self.pieces), Fraction(0))

    def edge_counts(self) -> Counter:
        tris = _pieces()
        return Counter(e for p in self.pieces for e in tris[p].edges)

    def __len__(self) -> int:
        return len(self.pieces)

    def __str__(self) -> str:
        return "[" + ",".join(self.pieces) + "]"


def enumerate_sphere_candidates(max_pieces: int = MAX_PIECES) -> list[TriangleMultiset]:
    """Multisets with total area 4 pi and an even count of every edge length."""
    ids = [t.id for t in enumerate_admissible_triangles()]
    out = []
    for k in range(1, max_pieces + 1):
        for combo in itertools.combinations_with_replacement(ids, k):
            ms = TriangleMultiset(combo)
            if ms.area == 4 and all(v % 2 == 0 for v in ms.edge_counts().values()):
                out.append(ms)
    return out


# ---------------------------------------------------------------------------
# gluing search


@dataclass
class GluingCertificate:
    """A closed gluing: edge pairs, vertex classes with angle sums, Euler characteristic.

    ``layout[i]`` lists the edge lengths of face ``i`` in counterclockwise
    order; edge ``j`` runs from corner ``j`` to corner ``j + 1``.
    """

    multiset: TriangleMultiset
    layout: list[tuple[Fraction, Fraction, Fraction]]
    pairs: list[tuple[tuple[int, int], tuple[int, int]]]
    vertices: list[list[tuple[int, int]]]
    angle_sums: list[float]
    euler: int

    def check(self) -> bool:
        seen = Counter(e for pair in self.pairs for e in pair)
        edges_ok = len(seen) == 3 * len(self.layout) and all(v == 1 for v in seen.values())
        lengths_ok = all(self.layout[a][i] == self.layout[b][j] for (a, i), (b, j) in self.pairs)
        angles_ok = all(abs(s - 2) < ANGLE_TOL for s in self.angle_sums)
        return edges_ok and lengths_ok and angles_ok and self.euler == 2


class _UF:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def _layouts(ms: TriangleMultiset) -> list[list[tuple[Fraction, Fraction, Fraction]]]:
    """Counterclockwise edge sequences; scalene pieces come in two mirror images."""
    tris = _pieces()
    options = []
    for p in ms.pieces:
        a, b, c = tris[p].edges
        opts = [(a, b, c)]
        if len({a, b, c}) == 3:
            opts.append((a, c, b))
        options.append(opts)
    seen = set()
    out = []
    for choice in itertools.product(*options):
        key = tuple(sorted(zip(ms.pieces, choice)))
        if key not in seen:
            seen.add(key)
            out.append(list(choice))
    return out


def _corner_table(layout: Sequence[tuple[Fraction, Fraction, Fraction]]) -> list[float]:
    """Angle at corner ``(face, j)``; corner ``j`` sits opposite edge ``j + 1``."""
    out = []
    for a, b, c in layout:
        ang = _corners((a, b, c))
        # corner 0 between edges 2 and 0, opposite edge 1; angles in ``ang`` are opposite a, b, c
        out += [ang[1], ang[2], ang[0]]
    return out


class _Search:
    def __init__(self, layout: list[tuple[Fraction, Fraction, Fraction]]):
        self.layout = layout
        self.nf = len(layout)
        self.angles = _corner_table(layout)
        self.match: dict[tuple[int, int], tuple[int, int]] = {}
        self.nodes = 0

    def _classes(self) -> tuple[_UF, dict[int, float], dict[int, bool]]:
        uf = _UF(3 * self.nf)
        for (f, i), (g, j) in self.match.items():
            # edge f:i runs corner i -> i+1, glued reversed onto g:j
            uf.union(3 * f + i, 3 * g + (j + 1) % 3)
            uf.union(3 * f + (i + 1) % 3, 3 * g + j)
        sums: dict[int, float] = {}
        closed: dict[int, bool] = {}
        for f in range(self.nf):
            for i in range(3):
                r = uf.find(3 * f + i)
                sums[r] = sums.get(r, 0.0) + self.angles[3 * f + i]
                done = (f, i) in self.match and (f, (i + 2) % 3) in self.match
                closed[r] = closed.get(r, True) and done
        return uf, sums, closed

    def _viable(self) -> bool:
        _, sums, closed = self._classes()
        for r, s in sums.items():
            if s > 2 + ANGLE_TOL:
                return False
            if closed[r] and abs(s - 2) > ANGLE_TOL:
                return False
        return True

    def run(self) -> bool:
        free = [(f, i) for f in range(self.nf) for i in range(3) if (f, i) not in self.match]
        if not free:
            return True
        e = free[0]
        length = self.layout[e[0]][e[1]]
        for o in free[1:]:
            if self.layout[o[0]][o[1]] != length:
                continue
            self.nodes += 1
            self.match[e] = o
            self.match[o] = e
            if self._viable() and self.run():
                return True
            del self.match[e]
            del self.match[o]
        return False

    def certificate(self, ms: TriangleMultiset) -> GluingCertificate:
        uf, sums, _ = self._classes()
        groups: dict[int, list[tuple[int, int]]] = {}
        for f in range(self.nf):
            for i in range(3):
                groups.setdefault(uf.find(3 * f + i), []).append((f, i))
        roots = sorted(groups, key=lambda r: groups[r][0])
        pairs = sorted({tuple(sorted((a, b))) for a, b in self.match.items()})
        V, E, F = len(roots), len(pairs), self.nf
        faces = _UF(self.nf)
        for (f, _), (g, _) in pairs:
            faces.union(f, g)
        connected = len({faces.find(f) for f in range(self.nf)}) == 1
        euler = V - E + F if connected else 0
        return GluingCertificate(ms, self.layout, pairs, [groups[r] for r in roots], [sums[r] for r in roots], euler)


def find_gluing(ms: TriangleMultiset) -> GluingCertificate | None:
    """Exhaustive edge-to-edge gluing search; None when no closed gluing exists."""
    for layout in _layouts(ms):
        s = _Search(layout)
        if s.run():
            cert = s.certificate(ms)
            if cert.check():
                return cert
    return None


def gluing_filter(candidates: Sequence[TriangleMultiset]) -> list[TriangleMultiset]:
    return [ms for ms in candidates if find_gluing(ms) is not None]


def maximal_tessellations() -> list[TriangleMultiset]:
    return gluing_filter(enumerate_sphere_candidates())


# ---------------------------------------------------------------------------
# summit realizations


@dataclass
class SummitSet:
    """Summit coordinates with free positive symbols; ``edges`` lists hull-edge lengths."""

    vectors: list[tuple[sympy.Expr, ...]]
    free: tuple[sympy.Symbol, ...]
    edges: list[tuple[int, int, Fraction]] = field(default_factory=list)

    def numeric(self, values: dict[str, float] | None = None) -> np.ndarray:
        subs = {s: (values or {}).get(str(s), 1.0) for s in self.free}
        return np.array([[float(sympy.N(c.subs(subs))) for c in v] for v in self.vectors])

    def norms2(self) -> list[sympy.Expr]:
        return [sympy.simplify(sum(c**2 for c in v)) for v in self.vectors]


_SYMBOLS = sympy.symbols("a b c d e f g h", positive=True)


def _norm_branches(n: int, edges: Sequence[tuple[int, int, Fraction]]) -> list[tuple[list[sympy.Expr], tuple[sympy.Symbol, ...]]]:
    """Consistent norm assignments: oblique edges fix ratios, other components get a fresh symbol."""
    adj: dict[int, list[tuple[int, Fraction]]] = {i: [] for i in range(n)}
    for i, j, L in edges:
        if L in NORM_RATIOS:
            adj[i].append((j, L))
            adj[j].append((i, L))
    comps = []
    seen: set[int] = set()
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    per_comp = []
    for k, comp in enumerate(comps):
        sym = _SYMBOLS[k]
        cedges = [(i, j, L) for i, j, L in edges if L in NORM_RATIOS and i in comp]
        options = []
        for choice in itertools.product(*(NORM_RATIOS[L] for _, _, L in cedges)):
            sq: dict[int, Fraction] = {comp[0]: Fraction(1)}
            ok = True
            changed = True
            while changed and ok:
                changed = False
                for (i, j, _), r in zip(cedges, choice):
                    if i in sq and j not in sq:
                        sq[j] = sq[i] / r
                        changed = True
                    elif j in sq and i not in sq:
                        sq[i] = sq[j] * r
                        changed = True
                    elif i in sq and j in sq and sq[i] != sq[j] * r:
                        ok = False
            if ok and len(sq) == len(comp):
                key = tuple(sq[i] for i in comp)
                if key not in [o[0] for o in options]:
                    options.append((key, sq))
        per_comp.append([(sym, sq) for _, sq in options])
    out = []
    for combo in itertools.product(*per_comp):
        norms: list[sympy.Expr] = [sympy.Integer(0)] * n
        for sym, sq in combo:
            for i, r in sq.items():
                norms[i] = sym * sympy.sqrt(sympy.Rational(r.numerator, r.denominator))
        out.append((norms, tuple(sym for sym, _ in combo)))
    return out


def _similarity_key(vectors: np.ndarray) -> tuple:
    """Normalized sorted Gram data, invariant under rotations, reflections and scaling."""
    G = vectors @ vectors.T
    G = G / np.max(np.abs(np.diag(G)))
    n = len(G)
    best = None
    for perm in itertools.permutations(range(n)) if n <= 6 else [tuple(range(n))]:
        key = tuple(round(float(G[i, j]), 6) for i in perm for j in perm)
        if best is None or key < best:
            best = key
    return best


def _realize_circle(cov: ArcMultiset) -> list[SummitSet]:
    # with at most three arcs, or four equal ones, every cyclic order is a
    # rotation or reflection of the sorted one
    n = len(cov.arcs)
    order = cov.arcs
    edges = [(i, (i + 1) % n, order[i]) for i in range(n)]
    angles = [sum(order[:i], Fraction(0)) for i in range(n)]
    results: list[SummitSet] = []
    keys = set()
    for norms, free in _norm_branches(n, edges):
        vecs = []
        for r, th in zip(norms, angles):
            t = sympy.pi * sympy.Rational(th.numerator, th.denominator)
            vecs.append((sympy.simplify(r * sympy.cos(t)), sympy.simplify(r * sympy.sin(t))))
        s = SummitSet(vecs, free, edges)
        key = _similarity_key(s.numeric(_generic(free)))
        if key not in keys:
            keys.add(key)
            results.append(s)
    return results


def _generic(free: Sequence[sympy.Symbol]) -> dict[str, float]:
    return {str(x): v for x, v in zip(free, (1.0, 1.7, 2.3, 3.1, 3.7, 4.3, 5.9, 6.1))}


def _place_third(A: np.ndarray, B: np.ndarray, dA: float, dB: float) -> np.ndarray:
    """Unit ``C`` at arc distance dA from A and dB from B with (A x B).C > 0."""
    c = float(A @ B)
    M = np.array([[1.0, c], [c, 1.0]])
    x, y = np.linalg.solve(M, [np.cos(dA), np.cos(dB)])
    N = np.cross(A, B)
    rest = 1.0 - (x * x + y * y + 2 * x * y * c)
    z = np.sqrt(max(rest, 0.0)) / np.linalg.norm(N)
    return x * A + y * B + z * N


def tessellation_directions(cert: GluingCertificate) -> tuple[np.ndarray, list[tuple[int, int, Fraction]]]:
    """Unit vertex directions developed from the gluing, and the tessellation edges."""
    vid = {}
    for k, group in enumerate(cert.vertices):
        for corner in group:
            vid[corner] = k
    pos: dict[tuple[int, int], np.ndarray] = {}
    L = [[float(x) * np.pi for x in tri] for tri in cert.layout]
    partner = {}
    for a, b in cert.pairs:
        partner[a] = b
        partner[b] = a
    l0, l1, l2 = L[0]
    A = np.array([0.0, 0.0, 1.0])
    B = np.array([np.sin(l0), 0.0, np.cos(l0)])
    pos[(0, 0)], pos[(0, 1)] = A, B
    pos[(0, 2)] = _place_third(A, B, l2, l1)
    placed = {0}
    queue = [0]
    while queue:
        f = queue.pop()
        for i in range(3):
            g, j = partner[(f, i)]
            if g in placed:
                continue
            # edge g:j runs corner j -> j+1 and equals f's corner i+1 -> i
            P, Q = pos[(f, (i + 1) % 3)], pos[(f, i)]
            pos[(g, j)], pos[(g, (j + 1) % 3)] = P, Q
            dA = L[g][(j + 2) % 3]
            dB = L[g][(j + 1) % 3]
            pos[(g, (j + 2) % 3)] = _place_third(P, Q, dA, dB)
            placed.add(g)
            queue.append(g)
    dirs = np.zeros((len(cert.vertices), 3))
    for k, group in enumerate(cert.vertices):
        pts = np.array([pos[c] for c in group])
        if np.max(np.abs(pts - pts[0])) > 1e-7:
            raise ArithmeticError("gluing does not develop consistently onto the sphere")
        dirs[k] = pts[0]
    edges = set()
    for f, tri in enumerate(cert.layout):
        for i in range(3):
            u, v = vid[(f, i)], vid[(f, (i + 1) % 3)]
            edges.add((min(u, v), max(u, v), tri[i]))
    return dirs, sorted(edges)


def _realize_sphere(ms: TriangleMultiset) -> list[SummitSet]:
    cert = find_gluing(ms)
    if cert is None:
        raise ValueError(f"{ms} admits no closed gluing")
    dirs, edges = tessellation_directions(cert)
    out = []
    keys = set()
    for norms, free in _norm_branches(len(dirs), edges):
        vecs = [tuple(r * sympy.Float(x, 15) for x in d) for r, d in zip(norms, dirs)]
        s = SummitSet(vecs, free, edges)
        key = _similarity_key(s.numeric(_generic(free)))
        if key not in keys:
            keys.add(key)
            out.append(s)
    return out


def realize_summit_sets(item: ArcMultiset | TriangleMultiset) -> list[SummitSet]:
    """Candidate summit sets, one per norm branch, up to rotation, reflection and scaling.

    Subsets of these sets cover the non-maximal configurations.  Dimension 3
    directions are numeric, developed from the gluing certificate.
    """
    if isinstance(item, ArcMultiset):
        if not item.is_covering:
            raise ValueError("not a full covering; complete it first")
        return _realize_circle(item)
    if isinstance(item, TriangleMultiset):
        return _realize_sphere(item)
    raise TypeError(f"unsupported input {item!r}")
