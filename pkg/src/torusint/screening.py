"""Exact screening of the necessary integrability conditions on the Fourier support.

The five conditions, for summits ``v_i`` of the convex hull ``C`` of the support ``S``:

1. ``S`` lies on the rays ``R+ v_i``.
2. Two summits sharing a hull edge make an angle in {0, pi/2, 2pi/3, 3pi/4, 5pi/6, pi}.
3. For the angles 2pi/3, 3pi/4, 5pi/6 the norm ratio is 1, 2^(+-1/2), 3^(+-1/2).
4. For 2pi/3 and 5pi/6 both rays meet ``S`` only at the summit.
5. For 3pi/4 with ratio sqrt(2), the ray of the longer summit meets ``S`` within
   {v, v/2} and the ray of the shorter one only at the summit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .potential import HullReport, Potential, convex_hull
from .quadext import Frequency, QuadExt, qext_sign, ray_factor


class ScreeningError(ValueError):
    pass


class AngleClass(enum.Enum):
    ZERO = (Fraction(0), "0")
    QUARTER = (Fraction(1, 2), "pi/2")
    TWO_THIRDS = (Fraction(2, 3), "2pi/3")
    THREE_QUARTERS = (Fraction(3, 4), "3pi/4")
    FIVE_SIXTHS = (Fraction(5, 6), "5pi/6")
    STRAIGHT = (Fraction(1), "pi")
    OTHER = (None, "other")

    @property
    def multiple_of_pi(self) -> Fraction | None:
        return self.value[0]

    @property
    def label(self) -> str:
        return self.value[1]


# (sign of v.w, cos^2) -> class
_ANGLE_TABLE = {
    (1, Fraction(1)): AngleClass.ZERO,
    (0, Fraction(0)): AngleClass.QUARTER,
    (-1, Fraction(1, 4)): AngleClass.TWO_THIRDS,
    (-1, Fraction(1, 2)): AngleClass.THREE_QUARTERS,
    (-1, Fraction(3, 4)): AngleClass.FIVE_SIXTHS,
    (-1, Fraction(1)): AngleClass.STRAIGHT,
}

# admissible squared-norm ratios for the oblique classes
_RATIOS = {
    AngleClass.TWO_THIRDS: {Fraction(1)},
    AngleClass.THREE_QUARTERS: {Fraction(1, 2), Fraction(2)},
    AngleClass.FIVE_SIXTHS: {Fraction(1, 3), Fraction(3)},
}

OBLIQUE = frozenset(_RATIOS)


def cos2(v: Sequence[QuadExt], w: Sequence[QuadExt]) -> QuadExt:
    v, w = Frequency(v), Frequency(w)
    d = v.dot(w)
    return d * d / (v.norm2() * w.norm2())


def classify_angle(v: Sequence[Any], w: Sequence[Any]) -> AngleClass:
    v, w = Frequency(v), Frequency(w)
    if v.is_zero() or w.is_zero():
        raise ScreeningError("angle with a zero vector is undefined")
    s = qext_sign(v.dot(w))
    r = cos2(v, w)
    if not r.is_rational:
        return AngleClass.OTHER
    return _ANGLE_TABLE.get((s, r.a), AngleClass.OTHER)


def norm_ratio(v: Frequency, w: Frequency) -> QuadExt:
    """Exact ``|v|^2 / |w|^2``."""
    return v.norm2() / w.norm2()


def ray_points(support: Sequence[Frequency], v: Frequency) -> list[tuple[Frequency, QuadExt]]:
    """Support points ``k = t v`` with ``t > 0``, paired with ``t``."""
    out = []
    for k in support:
        t = ray_factor(k, v)
        if t is not None:
            out.append((k, t))
    return out


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Witness:
    condition: int
    points: tuple[Frequency, ...]
    detail: str


@dataclass
class ScreeningReport:
    verdicts: dict[int, Verdict]
    witnesses: dict[int, list[Witness]]
    hull: HullReport
    edge_classes: list[tuple[int, int, AngleClass]] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(v is not Verdict.FAIL for v in self.verdicts.values())

    def failed(self) -> list[int]:
        return sorted(c for c, v in self.verdicts.items() if v is Verdict.FAIL)


def _exclusive_ray(support: Sequence[Frequency], v: Frequency, allowed: set[Fraction]) -> list[Frequency]:
    """Support points on the ray of ``v`` whose ratio is not in ``allowed``."""
    return [k for k, t in ray_points(support, v) if not (t.is_rational and t.a in allowed)]


def screen(V: Potential) -> ScreeningReport:
    if V.n > 3:
        raise ScreeningError(f"screening is implemented up to dimension 3, got {V.n}")
    if not V.terms:
        raise ScreeningError("empty support")
    hull = convex_hull(V)
    support = V.sorted_support()
    summits = hull.summits
    verdicts: dict[int, Verdict] = {}
    wit: dict[int, list[Witness]] = {c: [] for c in range(1, 6)}

    for k in support:
        if not any(ray_factor(k, v) is not None for v in summits):
            wit[1].append(Witness(1, (k,), "support point off every summit ray"))
    verdicts[1] = Verdict.FAIL if wit[1] else Verdict.PASS

    classes = []
    for i, j in hull.edges:
        classes.append((i, j, classify_angle(summits[i], summits[j])))
    applicable = {c: False for c in range(2, 6)}
    for i, j, cls in classes:
        vi, vj = summits[i], summits[j]
        applicable[2] = True
        if cls is AngleClass.OTHER:
            wit[2].append(Witness(2, (vi, vj), "edge angle not admissible"))
            continue
        if cls not in OBLIQUE:
            continue
        applicable[3] = True
        r = norm_ratio(vi, vj)
        if not (r.is_rational and r.a in _RATIOS[cls]):
            wit[3].append(Witness(3, (vi, vj), f"squared norm ratio {r} at angle {cls.label}"))
        if cls in (AngleClass.TWO_THIRDS, AngleClass.FIVE_SIXTHS):
            applicable[4] = True
            for v in (vi, vj):
                extra = _exclusive_ray(support, v, {Fraction(1)})
                if extra:
                    wit[4].append(Witness(4, (vi, vj) + tuple(extra), f"ray of {v!r} carries extra support"))
        elif r.is_rational and r.a in (Fraction(2), Fraction(1, 2)):
            applicable[5] = True
            longer, shorter = (vi, vj) if r.a == 2 else (vj, vi)
            extra = _exclusive_ray(support, longer, {Fraction(1), Fraction(1, 2)})
            extra += _exclusive_ray(support, shorter, {Fraction(1)})
            if extra:
                wit[5].append(Witness(5, (longer, shorter) + tuple(extra), "ray support outside the allowed set"))
    for c in range(2, 6):
        if wit[c]:
            verdicts[c] = Verdict.FAIL
        else:
            verdicts[c] = Verdict.PASS if applicable[c] else Verdict.NOT_APPLICABLE
    return ScreeningReport(verdicts, wit, hull, classes)


def recheck_witness(V: Potential, w: Witness) -> bool:
    """Re-run the predicate behind a failure witness; True when it still fails."""
    support = V.sorted_support()
    if w.condition == 1:
        hull = convex_hull(V)
        return not any(ray_factor(w.points[0], v) is not None for v in hull.summits)
    vi, vj = w.points[0], w.points[1]
    cls = classify_angle(vi, vj)
    if w.condition == 2:
        return cls is AngleClass.OTHER
    r = norm_ratio(vi, vj)
    if w.condition == 3:
        return not (r.is_rational and r.a in _RATIOS.get(cls, set()))
    if w.condition == 4:
        return any(_exclusive_ray(support, v, {Fraction(1)}) for v in (vi, vj))
    if w.condition == 5:
        return bool(_exclusive_ray(support, vi, {Fraction(1), Fraction(1, 2)}) or _exclusive_ray(support, vj, {Fraction(1)}))
    return False


# ---------------------------------------------------------------------------
# two-term edge potentials


def eqtre_member(k: Any, s: Any) -> int | None:
    """``n`` with ``(k s + 1)/(k^2 + 1) == -n/2`` for a natural ``n``, else None."""
    k, s = QuadExt.coerce(k), QuadExt.coerce(s)
    value = (k * s + 1) / (k * k + 1)
    if not value.is_rational:
        return None
    n = -2 * value.a
    if n.denominator != 1 or n < 0:
        return None
    return int(n)


@dataclass(frozen=True)
class TwoTermPair:
    """Frequencies ``(1, k)`` and ``(1, s)``; ``parametric`` marks the ``(k, -1/k)`` family."""

    k: QuadExt | None
    s: QuadExt | None
    n: int
    m: int
    angle: AngleClass
    parametric: bool = False

    def __str__(self) -> str:
        if self.parametric:
            return "(k, -1/k)"
        return f"({self.k}, {self.s})"


def _canonical(k: QuadExt, s: QuadExt) -> tuple[QuadExt, QuadExt]:
    """Representative up to ``(k, s) <-> (s, k)`` and ``(k, s) -> (-k, -s)``."""
    if abs(float(s)) > abs(float(k)):
        k, s = s, k
    if qext_sign(k) < 0:
        k, s = -k, -s
    return k, s


def _k_squared_roots(n: int, m: int) -> list[Fraction]:
    """Positive rational roots ``K = k^2`` of the eliminated system for (n, m).

    Substituting ``s = -(n(K+1)+2)/(2k)`` into the second equation gives
    ``(4n - m n^2) K^2 + (4n - 2mn(n+2) - 4m) K - m(n+2)^2 = 0``.
    """
    a = 4 * n - m * n * n
    b = 4 * n - 2 * m * n * (n + 2) - 4 * m
    c = -m * (n + 2) ** 2
    if a == 0:
        return [Fraction(-c, b)] if b and Fraction(-c, b) > 0 else []
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    root = QuadExt.sqrt_of(disc)
    out = []
    for sgn in (1, -1):
        K = (QuadExt(-b) + root * sgn) / (2 * a)
        if qext_sign(K) > 0:
            if not K.is_rational:
                raise ArithmeticError(f"k^2 = {K} leaves the quadratic fields")
            out.append(K.a)
    return out


def enumerate_two_term_pairs(max_index: int = 3) -> list[TwoTermPair]:
    """All two-term edge potentials satisfying the condition for ``V`` and its mirror.

    Cases with ``n m >= 4`` have no positive root: the leading coefficient is
    ``<= 0``, the constant is negative and the linear coefficient is negative,
    so both roots are negative or complex.  ``max_index`` bounds ``n, m`` for
    the explicit scan; any value >= 3 gives the same list.
    """
    out: list[TwoTermPair] = [
        TwoTermPair(None, None, 0, 0, AngleClass.QUARTER, parametric=True),
    ]
    seen = set()
    for n in range(1, max_index + 1):
        for m in range(1, max_index + 1):
            for K in _k_squared_roots(n, m):
                k = QuadExt.sqrt_of(K)
                s = -(QuadExt(n * (K + 1) + 2)) / (2 * k)
                if eqtre_member(k, s) != n or eqtre_member(s, k) != m:
                    raise ArithmeticError(f"root check failed for n={n}, m={m}")
                k, s = _canonical(k, s)
                if (k, s) in seen:
                    continue
                seen.add((k, s))
                angle = classify_angle([1, k], [1, s])
                out.append(TwoTermPair(k, s, n, m, angle))
    out[1:] = sorted(out[1:], key=lambda p: (p.angle.multiple_of_pi, float(p.k)))
    return out
