"""Phase-space polynomials ``sum c * p^a * exp(k.q)`` and their Poisson bracket.

Everything is in the real normal form: exponentials are ``exp(k.q)`` with
``d/dq_i exp(k.q) = k_i exp(k.q)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np
import sympy
from sympy.polys.domains.domain import Domain

from . import scalars
from .quadext import Frequency, QuadExt, common_radicand

Key = tuple[tuple[int, ...], Frequency]


class DimensionError(ValueError):
    pass


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


class PhasePolynomial:
    """Immutable finite sum of ``coeff * p^pexp * exp(freq . q)`` terms.

    Coefficients live in a sympy field ``domain``; frequencies are exact
    :class:`Frequency` vectors.  No stored term has a zero coefficient.
    """

    __slots__ = ("n", "domain", "terms", "_hash")

    def __init__(self, n: int, domain: Domain, terms: Mapping[Key, Any] | Iterable[tuple[Key, Any]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Key, Any] = {}
        radicands = set()
        for (pexp, freq), c in items:
            if len(pexp) != n or len(freq) != n:
                raise DimensionError(f"term {pexp}, {freq!r} does not have dimension {n}")
            freq = freq if isinstance(freq, Frequency) else Frequency(freq)
            r = freq.radicand
            if r != 1:
                radicands.add(r)
            key = (tuple(pexp), freq)
            clean[key] = clean[key] + c if key in clean else c
        if len(radicands) > 1:
            raise DimensionError(f"mixed radicands {sorted(radicands)}")
        if radicands:
            r = radicands.pop()
            dr = scalars.domain_radicand(domain)
            if dr == 1:
                target = scalars.coefficient_domain(scalars.domain_params(domain), r)
                clean = {k: target.convert_from(c, domain) for k, c in clean.items()}
                domain = target
            elif dr != r:
                raise DimensionError(f"radicand mismatch: coefficients {dr}, frequencies {r}")
        self.n = n
        self.domain = domain
        self.terms = {k: c for k, c in clean.items() if c}
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, n: int, domain: Domain) -> "PhasePolynomial":
        return cls(n, domain)

    @classmethod
    def constant(cls, n: int, domain: Domain, c: Any = 1) -> "PhasePolynomial":
        return cls(n, domain, {((0,) * n, Frequency.zero(n)): scalars.convert(domain, c)})

    @classmethod
    def momentum(cls, n: int, domain: Domain, i: int) -> "PhasePolynomial":
        return cls(n, domain, {(_unit(n, i), Frequency.zero(n)): domain.one})

    @classmethod
    def exponential(cls, freq: Sequence[Any], domain: Domain, c: Any = 1) -> "PhasePolynomial":
        f = Frequency(freq)
        return cls(len(f), domain, {((0,) * len(f), f): scalars.convert(domain, c)})

    @classmethod
    def monomial(cls, pexp: Sequence[int], freq: Sequence[Any], domain: Domain, c: Any = 1) -> "PhasePolynomial":
        f = Frequency(freq)
        return cls(len(f), domain, {(tuple(pexp), f): scalars.convert(domain, c)})

    # -- basic protocol ----------------------------------------------------
    @property
    def radicand(self) -> int:
        return scalars.domain_radicand(self.domain)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[tuple[Key, Any]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key()))

    def __iter__(self) -> Iterator[tuple[Key, Any]]:
        return iter(self.sorted_terms())

    def momentum_degree(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=0)

    def frequencies(self) -> set[Frequency]:
        return {f for _, f in self.terms}

    def coefficient(self, pexp: Sequence[int], freq: Sequence[Any]) -> Any:
        return self.terms.get((tuple(pexp), Frequency(freq)), self.domain.zero)

    def with_domain(self, domain: Domain) -> "PhasePolynomial":
        if domain == self.domain:
            return self
        return PhasePolynomial(
            self.n, domain, {k: domain.convert_from(c, self.domain) for k, c in self.terms.items()}
        )

    def _align(self, other: "PhasePolynomial") -> tuple["PhasePolynomial", "PhasePolynomial"]:
        if self.n != other.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        if self.domain == other.domain:
            return self, other
        try:
            K = scalars.merge_domains(self.domain, other.domain)
        except scalars.ScalarError as exc:
            raise DimensionError(str(exc)) from exc
        return self.with_domain(K), other.with_domain(K)

    def _lift(self, other: Any) -> "PhasePolynomial":
        if isinstance(other, PhasePolynomial):
            return other
        return PhasePolynomial.constant(self.n, self.domain, other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PhasePolynomial):
            a, b = self._align(other)
            return a.terms == b.terms
        if isinstance(other, (int, QuadExt)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms))
        return self._hash

    # -- ring operations ---------------------------------------------------
    def __neg__(self) -> "PhasePolynomial":
        return PhasePolynomial(self.n, self.domain, {k: -c for k, c in self.terms.items()})

    def __add__(self, other: Any) -> "PhasePolynomial":
        a, b = self._align(self._lift(other))
        out = dict(a.terms)
        for k, c in b.terms.items():
            out[k] = out[k] + c if k in out else c
        return PhasePolynomial(a.n, a.domain, out)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "PhasePolynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "PhasePolynomial":
        return self._lift(other) - self

    def scale(self, c: Any) -> "PhasePolynomial":
        c = scalars.convert(self.domain, c)
        return PhasePolynomial(self.n, self.domain, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: Any) -> "PhasePolynomial":
        if not isinstance(other, PhasePolynomial):
            return self.scale(other)
        a, b = self._align(other)
        out: dict[Key, Any] = {}
        fsum: dict[tuple[Frequency, Frequency], Frequency] = {}
        for (pa, fa), ca in a.terms.items():
            for (pb, fb), cb in b.terms.items():
                f = fsum.get((fa, fb))
                if f is None:
                    f = fsum[(fa, fb)] = fa.plus(fb)
                key = (tuple(x + y for x, y in zip(pa, pb)), f)
                v = ca * cb
                out[key] = out[key] + v if key in out else v
        return PhasePolynomial(a.n, a.domain, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PhasePolynomial":
        if k < 0:
            raise ValueError("negative power")
        out = PhasePolynomial.constant(self.n, self.domain, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff_p(self, i: int) -> "PhasePolynomial":
        out = {}
        for (a, f), c in self.terms.items():
            if a[i]:
                b = a[:i] + (a[i] - 1,) + a[i + 1 :]
                out[(b, f)] = c * a[i]
        return PhasePolynomial(self.n, self.domain, out)

    def diff_q(self, i: int) -> "PhasePolynomial":
        conv = _QConverter(self.domain)
        out = {}
        for (a, f), c in self.terms.items():
            if f[i]:
                out[(a, f)] = c * conv(f[i])
        return PhasePolynomial(self.n, self.domain, out)

    # -- numerics ----------------------------------------------------------
    def compile(self, params: Mapping[str, float] | None = None) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
        """Vectorised float evaluator ``f(p, q)``; p, q of shape (..., n)."""
        if not self.terms:
            return lambda p, q: np.zeros(np.shape(p)[:-1])
        keys = list(self.terms)
        coeffs = np.array([scalars.to_float(self.domain, self.terms[k], params) for k in keys])
        pexp = np.array([k[0] for k in keys], dtype=float)
        freqs = np.array([k[1].to_floats() for k in keys], dtype=float)

        def evaluate(p: np.ndarray, q: np.ndarray) -> np.ndarray:
            p = np.asarray(p, dtype=float)
            q = np.asarray(q, dtype=float)
            mon = np.prod(p[..., None, :] ** pexp, axis=-1)
            ex = np.exp(q @ freqs.T)
            return (mon * ex) @ coeffs

        return evaluate

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, f), c in self.sorted_terms():
            factors = [f"p{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(a) if e]
            if not f.is_zero():
                arg = " + ".join(f"({x})*q{i + 1}" for i, x in enumerate(f) if x)
                factors.append(f"exp({arg})")
            cs = str(self.domain.to_sympy(c))
            if factors:
                body = "*".join(factors)
                parts.append(body if cs == "1" else f"-{body}" if cs == "-1" else f"({cs})*{body}")
            else:
                parts.append(f"({cs})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PhasePolynomial(n={self.n}, {self})"


class _QConverter:
    """Memoised QuadExt -> domain conversion."""

    def __init__(self, domain: Domain):
        self.domain = domain
        self.cache: dict[QuadExt, Any] = {}

    def __call__(self, x: QuadExt) -> Any:
        v = self.cache.get(x)
        if v is None:
            v = self.cache[x] = scalars.from_qext(self.domain, x)
        return v


def poisson_bracket(F: PhasePolynomial, G: PhasePolynomial) -> PhasePolynomial:
    """``{F, G} = sum_i dF/dq_i dG/dp_i - dF/dp_i dG/dq_i``, computed exactly."""
    F, G = F._align(G)
    n = F.n
    conv = _QConverter(F.domain)
    out: dict[Key, Any] = {}
    for (a1, k1), c1 in F.terms.items():
        for (a2, k2), c2 in G.terms.items():
            k = None
            c12 = None
            base = None
            for i in range(n):
                w = k1[i] * a2[i] - k2[i] * a1[i]
                if not w:
                    continue
                if k is None:
                    k = k1.plus(k2)
                    c12 = c1 * c2
                    base = [x + y for x, y in zip(a1, a2)]
                pexp = list(base)
                pexp[i] -= 1
                key = (tuple(pexp), k)
                v = c12 * conv(w)
                out[key] = out[key] + v if key in out else v
    return PhasePolynomial(n, F.domain, out)


def evaluate_numeric(
    F: PhasePolynomial,
    p: Sequence[float],
    q: Sequence[float],
    params: Mapping[str, float] | None = None,
) -> float:
    """Float value of ``F`` at one phase point; exponentials are real ``exp(k.q)``."""
    if len(p) != F.n or len(q) != F.n:
        raise DimensionError(f"point dimension does not match n={F.n}")
    return float(F.compile(params)(np.asarray(p, float), np.asarray(q, float)))


def kinetic_energy(n: int, domain: Domain) -> PhasePolynomial:
    half = scalars.convert(domain, 1) / scalars.convert(domain, 2)
    return PhasePolynomial(
        n, domain, {(tuple(2 * e for e in _unit(n, i)), Frequency.zero(n)): half for i in range(n)}
    )


def realify(F: PhasePolynomial) -> PhasePolynomial:
    """Convert a polynomial written for ``exp(i k.q)`` into the real normal form.

    Substituting ``p -> i p`` (and ``exp(i k.q) -> exp(k.q)``) preserves
    brackets exactly; the result is divided by ``i**deg`` of the top momentum
    degree so the coefficients stay real.  Needs all momentum degrees of one
    parity.
    """
    degs = {sum(a) for a, _ in F.terms}
    if not degs:
        return F
    if len({d % 2 for d in degs}) != 1:
        raise ValueError("mixed momentum-degree parity; no real normal form")
    top = max(degs)
    return PhasePolynomial(
        F.n,
        F.domain,
        {(a, f): c * (-1 if ((top - sum(a)) // 2) % 2 else 1) for (a, f), c in F.terms.items()},
    )


def phase_symbols(n: int) -> tuple[tuple[sympy.Symbol, ...], tuple[sympy.Symbol, ...]]:
    return sympy.symbols(f"p1:{n + 1}"), sympy.symbols(f"q1:{n + 1}")


def _split_radical(c: sympy.Expr, d: int) -> QuadExt:
    c = sympy.nsimplify(sympy.expand(c))
    if d == 1:
        if not c.is_Rational:
            raise ValueError(f"frequency coordinate {c} is not rational")
        return QuadExt(Fraction(int(c.p), int(c.q)))
    r = sympy.sqrt(d)
    b = sympy.expand(c).coeff(r)
    a = sympy.expand(c - b * r)
    if not (a.is_Rational and b.is_Rational):
        raise ValueError(f"frequency coordinate {c} is not in Q(sqrt({d}))")
    return QuadExt(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)), d)


def from_sympy(expr: Any, n: int, params: Sequence[str] = (), radicand: int = 1) -> PhasePolynomial:
    """Build a phase polynomial from a sympy expression in ``p1..pn``, ``q1..qn``.

    Exponentials must be ``exp(linear form in q)``; coefficients may involve
    the named parameters and ``sqrt(radicand)``.
    """
    if isinstance(expr, str):
        ns = {str(s): s for s in sympy.symbols(list(params))} if params else {}
        expr = sympy.sympify(expr, locals=ns)
    ps, qs = phase_symbols(n)
    K = scalars.coefficient_domain(tuple(params), radicand)
    expr = sympy.powsimp(sympy.expand(expr, power_exp=False), combine="exp")
    terms: dict[Key, Any] = {}
    for term in sympy.Add.make_args(expr):
        arg = sympy.Integer(0)
        rest = []
        for f in sympy.Mul.make_args(term):
            base, e = f.as_base_exp()
            if isinstance(base, sympy.exp) or base is sympy.E:
                arg += (base.args[0] if isinstance(base, sympy.exp) else 1) * e
            else:
                rest.append(f)
        arg = sympy.expand(arg)
        coords = [_split_radical(arg.coeff(q), radicand) for q in qs]
        if sympy.expand(arg - sum(c * q for c, q in zip((arg.coeff(q) for q in qs), qs))) != 0:
            raise ValueError(f"exponent {arg} is not a linear form in q")
        poly = sympy.Poly(sympy.Mul(*rest), *ps)
        if len(poly.terms()) != 1:
            raise ValueError(f"term {term} is not a monomial in p")
        (pexp, c), = poly.terms()
        key = (tuple(pexp), Frequency(coords))
        v = K.from_sympy(c)
        terms[key] = terms[key] + v if key in terms else v
    return PhasePolynomial(n, K, terms)


def to_sympy(F: PhasePolynomial) -> sympy.Expr:
    ps, qs = phase_symbols(F.n)
    out = sympy.Integer(0)
    for (a, f), c in F.sorted_terms():
        mono = sympy.Mul(*(x**e for x, e in zip(ps, a)))
        arg = sum((sympy.Rational(k.a) + sympy.Rational(k.b) * sympy.sqrt(k.d)) * q for k, q in zip(f, qs))
        out += F.domain.to_sympy(c) * mono * sympy.exp(arg)
    return out
