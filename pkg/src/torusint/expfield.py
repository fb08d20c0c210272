"""Integration of exponential-polynomial functions inside their own field.

A function ``f(t) = prod X_j^beta_j P(X) prod Q_j(X)^alpha_j`` evaluated at
``X_j = exp(L_j t)`` is differentiated by ``D = sum_j L_j X_j d/dX_j``.  An
integral in the field has the form ``prod X_j^beta_j G(X) prod Q_j^(alpha_j+1)``
with ``G`` a Laurent polynomial, and every weighted degree or valuation of
``f`` that is not an integer pins the matching measure of ``G``.  The rates
``L_j`` are kept as field elements; for ``X_j = exp(i lambda_j t)`` the common
factor ``i`` only rescales ``G``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import sympy
from scipy.optimize import linprog
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.domains.domain import Domain

from . import linalg, scalars


class SlackExhaustedError(RuntimeError):
    """No integral inside the slack-relaxed support; not a proof of non-existence."""


# ---------------------------------------------------------------------------
# affine exponents such as 1/2 or -2*gamma - 1


@dataclass(frozen=True)
class Exponent:
    const: Fraction = Fraction(0)
    coeffs: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def coerce(cls, x: Any) -> "Exponent":
        if isinstance(x, Exponent):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        if isinstance(x, str):
            x = _parse(x, ())
        expr = sympy.nsimplify(sympy.sympify(x), rational=True)
        syms = sorted(expr.free_symbols, key=str)
        poly = sympy.Poly(expr, *syms) if syms else None
        if poly is not None and poly.total_degree() > 1:
            raise ValueError(f"exponent {x} is not affine in its parameters")
        const = expr.subs({s: 0 for s in syms})
        coeffs = []
        for s in syms:
            c = sympy.Rational(expr.coeff(s))
            coeffs.append((str(s), Fraction(int(c.p), int(c.q))))
        if not const.is_Rational:
            raise ValueError(f"exponent {x} has a non-rational constant part")
        return cls._make(Fraction(int(const.p), int(const.q)), dict(coeffs))

    @classmethod
    def _make(cls, const: Fraction, coeffs: Mapping[str, Fraction]) -> "Exponent":
        return cls(const, tuple(sorted((k, v) for k, v in coeffs.items() if v)))

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: Any) -> "Exponent":
        o = Exponent.coerce(other)
        c = dict(self.coeffs)
        for k, v in o.coeffs:
            c[k] = c.get(k, Fraction(0)) + v
        return Exponent._make(self.const + o.const, c)

    __radd__ = __add__

    def __neg__(self) -> "Exponent":
        return Exponent._make(-self.const, {k: -v for k, v in self.coeffs})

    def __sub__(self, other: Any) -> "Exponent":
        return self + (-Exponent.coerce(other))

    def __mul__(self, k: int | Fraction) -> "Exponent":
        k = Fraction(k)
        return Exponent._make(self.const * k, {n: v * k for n, v in self.coeffs})

    __rmul__ = __mul__

    def known_integer(self) -> bool:
        return self.is_constant and self.const.denominator == 1

    def to_sympy(self) -> sympy.Expr:
        e = sympy.Rational(self.const.numerator, self.const.denominator)
        for k, v in self.coeffs:
            e += sympy.Rational(v.numerator, v.denominator) * sympy.Symbol(k)
        return e

    def to_domain(self, K: Domain) -> Any:
        out = scalars.convert(K, self.const)
        for k, v in self.coeffs:
            out += scalars.convert(K, v) * K.convert(sympy.Symbol(k))
        return out

    def __str__(self) -> str:
        return str(self.to_sympy())


class Assumptions:
    """Facts ``N * gamma`` is not an integer, per parameter ``gamma``."""

    def __init__(self, facts: Mapping[str, Iterable[int]] | None = None):
        self.facts: dict[str, frozenset[int]] = {}
        for name, ns in (facts or {}).items():
            ns = frozenset(int(n) for n in ns)
            if any(n < 1 for n in ns):
                raise ValueError("multipliers must be positive integers")
            self.facts[name] = ns

    def certifies_noninteger(self, e: Exponent) -> bool:
        """True when ``e`` provably avoids the integers.

        If ``r/s + (p/q) gamma`` were an integer ``k`` then
        ``N gamma = N q (k s - r) / (p s)``, an integer whenever ``p s``
        divides ``N q``.
        """
        if e.is_constant:
            return e.const.denominator != 1
        if len(e.coeffs) != 1:
            return False
        name, c = e.coeffs[0]
        s = e.const.denominator
        p, q = abs(c.numerator), c.denominator
        return any((n * q) % (p * s) == 0 for n in self.facts.get(name, ()))


# ---------------------------------------------------------------------------
# Laurent polynomials


Monomial = tuple[int, ...]


class LaurentPoly:
    __slots__ = ("m", "domain", "terms")

    def __init__(self, m: int, domain: Domain, terms: Mapping[Monomial, Any] | None = None):
        self.m = m
        self.domain = domain
        self.terms: dict[Monomial, Any] = {}
        for e, c in (terms or {}).items():
            if len(e) != m:
                raise ValueError("exponent length mismatch")
            if c:
                self.terms[tuple(int(x) for x in e)] = c

    @classmethod
    def monomial(cls, m: int, K: Domain, e: Monomial, c: Any = None) -> "LaurentPoly":
        return cls(m, K, {tuple(e): K.one if c is None else c})

    @classmethod
    def constant(cls, m: int, K: Domain, c: Any) -> "LaurentPoly":
        return cls(m, K, {(0,) * m: c})

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.m == other.m and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, self.domain.zero) + c
        return LaurentPoly(self.m, self.domain, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.m, self.domain, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[Monomial, Any] = {}
        for (e1, c1), (e2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, self.domain.zero) + c1 * c2
        return LaurentPoly(self.m, self.domain, out)

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative power of a Laurent polynomial")
        out = LaurentPoly.constant(self.m, self.domain, self.domain.one)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: Any) -> "LaurentPoly":
        return LaurentPoly(self.m, self.domain, {e: c * v for e, v in self.terms.items()})

    def shift(self, e: Monomial) -> "LaurentPoly":
        return LaurentPoly(self.m, self.domain, {tuple(a + b for a, b in zip(k, e)): c for k, c in self.terms.items()})

    def derive(self, rates: Sequence[Any]) -> "LaurentPoly":
        """``sum_j L_j X_j dP/dX_j``."""
        K = self.domain
        out = {}
        for e, c in self.terms.items():
            w = K.zero
            for r, a in zip(rates, e):
                if a:
                    w += r * a
            out[e] = c * w
        return LaurentPoly(self.m, K, out)

    def degree(self, w: Sequence[int]) -> int:
        return max(sum(a * b for a, b in zip(w, e)) for e in self.terms)

    def valuation(self, w: Sequence[int]) -> int:
        return min(sum(a * b for a, b in zip(w, e)) for e in self.terms)

    def with_domain(self, K: Domain) -> "LaurentPoly":
        if K == self.domain:
            return self
        return LaurentPoly(self.m, K, {e: K.convert_from(c, self.domain) for e, c in self.terms.items()})

    def to_sympy(self, variables: Sequence[sympy.Symbol]) -> sympy.Expr:
        out = sympy.Integer(0)
        for e, c in sorted(self.terms.items()):
            t = self.domain.to_sympy(c)
            for v, a in zip(variables, e):
                t *= v**a
            out += t
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_sympy(sympy.symbols(f'X1:{self.m + 1}'))})"


def _parse(text: str, names: Iterable[str]) -> sympy.Expr:
    local = {n: sympy.Symbol(n) for n in names}
    for tok in set(re.findall(r"[A-Za-z_][A-Za-z0-9_]*", text)):
        local.setdefault(tok, sympy.Symbol(tok))
    return parse_expr(text.replace("^", "**"), local_dict=local, evaluate=True)


def laurent_from_sympy(expr: Any, variables: Sequence[str], K: Domain) -> LaurentPoly:
    expr = _parse(expr, variables) if isinstance(expr, str) else sympy.sympify(expr)
    syms = [sympy.Symbol(v) for v in variables]
    out: dict[Monomial, Any] = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        if term == 0:
            continue
        powers = term.as_powers_dict()
        e = []
        coef = sympy.Integer(1)
        for s in syms:
            a = powers.pop(s, 0)
            if not (sympy.sympify(a).is_Integer):
                raise ValueError(f"non-integer exponent {a} of {s} in a Laurent polynomial")
            e.append(int(a))
        for base, a in powers.items():
            coef *= base**a
        if coef.free_symbols & set(syms):
            raise ValueError(f"term {term} is not a Laurent monomial")
        key = tuple(e)
        out[key] = out.get(key, K.zero) + K.from_sympy(coef)
    return LaurentPoly(len(syms), K, out)


# ---------------------------------------------------------------------------
# functions of the exponential field


@dataclass
class ExpFieldFunction:
    """``prod X_j^beta_j * P * prod Q_j^alpha_j`` with ``X_j = exp(rates_j t)``."""

    variables: tuple[str, ...]
    rates: tuple[Any, ...]
    betas: tuple[Exponent, ...]
    P: LaurentPoly
    factors: tuple[tuple[LaurentPoly, Exponent], ...]
    domain: Domain

    def __post_init__(self) -> None:
        m = len(self.variables)
        if len(self.rates) != m or len(self.betas) != m:
            raise ValueError("variables, rates and betas must have equal length")
        folded = self.P
        kept = []
        for Q, a in self.factors:
            if Q.m != m:
                raise ValueError("factor has the wrong number of variables")
            if Q.is_zero() or Q.is_monomial():
                raise ValueError("factors must not be monomials; move them into betas")
            if a.known_integer() and a.const >= 0:
                folded = folded * Q ** int(a.const)
                continue
            if any(Q == Q2 for Q2, _ in kept):
                raise ValueError("factors must be distinct")
            kept.append((Q, a))
        self.P = folded
        self.factors = tuple(kept)

    @classmethod
    def build(
        cls,
        variables: Sequence[str],
        rates: Sequence[Any],
        P: Any,
        factors: Sequence[tuple[Any, Any]] = (),
        betas: Sequence[Any] | None = None,
        params: Sequence[str] = (),
    ) -> "ExpFieldFunction":
        """Parse strings or sympy expressions; every other symbol becomes a field parameter."""
        variables = tuple(variables)
        m = len(variables)
        bexp = tuple(Exponent.coerce(b) for b in (betas if betas is not None else [0] * m))
        fexp = [(q, Exponent.coerce(a)) for q, a in factors]
        names = dict.fromkeys(params)
        exprs = [_parse(x, variables) if isinstance(x, str) else sympy.sympify(x) for x in [P, *rates, *(q for q, _ in fexp)]]
        for ex in exprs:
            for s in sorted(ex.free_symbols, key=str):
                if str(s) not in variables:
                    names.setdefault(str(s))
        for e in list(bexp) + [a for _, a in fexp]:
            for p in e.params:
                names.setdefault(p)
        K = scalars.coefficient_domain(tuple(names))
        Pl = laurent_from_sympy(exprs[0], variables, K)
        rK = tuple(K.from_sympy(r) for r in exprs[1 : 1 + m])
        fl = tuple((laurent_from_sympy(q, variables, K), a) for q, (_, a) in zip(exprs[1 + m :], fexp))
        return cls(variables, rK, bexp, Pl, fl, K)

    @property
    def m(self) -> int:
        return len(self.variables)

    def to_sympy(self) -> sympy.Expr:
        syms = sympy.symbols(self.variables)
        if self.m == 1 and not isinstance(syms, (list, tuple)):
            syms = (syms,)
        out = self.P.to_sympy(syms)
        for x, b in zip(syms, self.betas):
            out *= x ** b.to_sympy()
        for Q, a in self.factors:
            out *= Q.to_sympy(syms) ** a.to_sympy()
        return out

    def __str__(self) -> str:
        return str(self.to_sympy())

    def same_shape(self, other: "ExpFieldFunction") -> bool:
        """Equal data: betas, factor list with exponents, and ``P``."""
        return (
            self.betas == other.betas
            and len(self.factors) == len(other.factors)
            and all(q1 == q2 and a1 == a2 for (q1, a1), (q2, a2) in zip(self.factors, other.factors))
            and self.P == other.P
        )


def weighted_measure(f: ExpFieldFunction, w: Sequence[int]) -> tuple[Exponent, Exponent]:
    """Weighted degree and valuation of ``f`` (affine in the exponent parameters)."""
    if f.P.is_zero():
        raise ValueError("the zero function has no degree")
    w = tuple(int(x) for x in w)
    bw = Exponent()
    for b, x in zip(f.betas, w):
        bw = bw + b * x
    deg = bw + f.P.degree(w)
    val = bw + f.P.valuation(w)
    for Q, a in f.factors:
        deg = deg + a * Q.degree(w)
        val = val + a * Q.valuation(w)
    return deg, val


def apply_derivation(g: ExpFieldFunction) -> ExpFieldFunction:
    """``D g`` written over the same factors with every exponent lowered by one."""
    K = g.domain
    prod = LaurentPoly.constant(g.m, K, K.one)
    for Q, _ in g.factors:
        prod = prod * Q
    bl = K.zero
    for b, r in zip(g.betas, g.rates):
        bl += b.to_domain(K) * r
    body = g.P.scale(bl) * prod + g.P.derive(g.rates) * prod
    for j, (Q, a) in enumerate(g.factors):
        rest = LaurentPoly.constant(g.m, K, K.one)
        for k, (Q2, _) in enumerate(g.factors):
            if k != j:
                rest = rest * Q2
        body = body + (g.P * Q.derive(g.rates) * rest).scale(a.to_domain(K))
    out = ExpFieldFunction(g.variables, g.rates, g.betas, LaurentPoly(g.m, K), (), K)
    out.P = body
    out.factors = tuple((Q, a - 1) for Q, a in g.factors)
    return out


def bounding_weights(m: int) -> list[tuple[int, ...]]:
    """Coordinate weights, the all-ones weight and the alternating weight."""
    out = [tuple(int(i == j) for i in range(m)) for j in range(m)]
    out.append((1,) * m)
    out.append(tuple((-1) ** i for i in range(m)))
    return list(dict.fromkeys(out))


@dataclass
class SupportBounds:
    """Half-spaces ``u . e <= c`` for the exponents of ``G``."""

    halfspaces: list[tuple[tuple[int, ...], int]]
    certified: bool
    notes: list[str] = field(default_factory=list)

    def box(self, m: int) -> list[tuple[int, int]] | None:
        """Integer bounding box, or None when the region is unbounded."""
        A = np.array([u for u, _ in self.halfspaces], dtype=float).reshape(-1, m)
        b = np.array([c for _, c in self.halfspaces], dtype=float)
        out = []
        for i in range(m):
            lohi = []
            for sgn in (1.0, -1.0):
                cost = np.zeros(m)
                cost[i] = sgn
                res = linprog(cost, A_ub=A, b_ub=b, bounds=[(None, None)] * m, method="highs")
                if res.status == 2:
                    return []
                if res.status != 0:
                    return None
                lohi.append(sgn * res.fun)
            out.append((math.ceil(lohi[0] - 1e-9), math.floor(lohi[1] + 1e-9)))
        return out

    def points(self, m: int) -> list[tuple[int, ...]]:
        box = self.box(m)
        if box is None:
            raise ValueError("support region is unbounded")
        if box == []:
            return []
        pts = []
        for e in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
            if all(sum(a * b for a, b in zip(u, e)) <= c for u, c in self.halfspaces):
                pts.append(e)
        return pts


def support_bounds(f: ExpFieldFunction, assumptions: Assumptions, slack: int = 2) -> SupportBounds:
    certified: list[tuple[tuple[int, ...], int]] = []
    relaxed: list[tuple[tuple[int, ...], int]] = []
    notes = []
    for w in bounding_weights(f.m):
        deg, val = weighted_measure(f, w)
        dG = f.P.degree(w) - sum(Q.degree(w) for Q, _ in f.factors)
        vG = f.P.valuation(w) - sum(Q.valuation(w) for Q, _ in f.factors)
        neg = tuple(-x for x in w)
        if assumptions.certifies_noninteger(deg):
            certified.append((w, dG))
        else:
            relaxed.append((w, dG + slack))
            notes.append(f"degree {deg} for weight {w} relaxed by {slack}")
        if assumptions.certifies_noninteger(val):
            certified.append((neg, -vG))
        else:
            relaxed.append((neg, -vG + slack))
            notes.append(f"valuation {val} for weight {w} relaxed by {slack}")
    exact = SupportBounds(certified, True)
    if certified and exact.box(f.m) is not None:
        return exact
    return SupportBounds(certified + relaxed, False, notes)


def integrate_in_field(
    f: ExpFieldFunction,
    assumptions: Assumptions | Mapping[str, Iterable[int]] | None = None,
    slack: int = 2,
) -> ExpFieldFunction | None:
    """An integral ``g`` with ``D g = f`` in the field of ``f``, or None.

    None is returned only when it is certified: some exponent equals -1, or
    the support of ``G`` is fixed by non-integer measures and the linear
    system has no solution.  When the bound relied on the slack and no
    solution exists, :class:`SlackExhaustedError` is raised.  Free
    coefficients of the solution are set to zero, highest monomials first.
    """
    if not isinstance(assumptions, Assumptions):
        assumptions = Assumptions(assumptions)
    K = f.domain
    if any(a.is_constant and a.const == -1 for _, a in f.factors):
        return None
    up = tuple((Q, a + 1) for Q, a in f.factors)
    if f.P.is_zero():
        return _with(f, LaurentPoly(f.m, K), up)
    bounds = support_bounds(f, assumptions, slack)
    pts = sorted(bounds.points(f.m), key=lambda e: (sum(e), e))

    shape = _with(f, LaurentPoly.constant(f.m, K, K.one), up)
    columns = []
    for e in pts:
        shape.P = LaurentPoly.monomial(f.m, K, e)
        columns.append(apply_derivation(shape).P)
    index: dict[Monomial, int] = {}
    for col in columns:
        for key in col.terms:
            index.setdefault(key, len(index))
    for key in f.P.terms:
        index.setdefault(key, len(index))
    rows: list[dict[int, Any]] = [{} for _ in index]
    for j, col in enumerate(columns):
        for key, c in col.terms.items():
            rows[index[key]][j] = c
    rhs = [K.zero] * len(index)
    for key, c in f.P.terms.items():
        rhs[index[key]] = c
    sol = linalg.solve(rows, rhs, len(pts), K) if pts else None
    if sol is None:
        if bounds.certified:
            return None
        raise SlackExhaustedError("; ".join(bounds.notes) or "no integral within the relaxed support")
    G = LaurentPoly(f.m, K, {pts[j]: c for j, c in sol.items()})
    g = _with(f, G, up)
    if not apply_derivation(g).same_shape(f):
        raise ArithmeticError("round trip D(g) = f failed")
    return g


def _with(f: ExpFieldFunction, P: LaurentPoly, factors: tuple) -> ExpFieldFunction:
    g = ExpFieldFunction(f.variables, f.rates, f.betas, LaurentPoly(f.m, f.domain), (), f.domain)
    g.P = P
    g.factors = factors
    return g
