"""Coefficient fields: rational functions in named parameters, optionally over Q(sqrt(d)).

Coefficients are elements of sympy polynomial-domain fields (``QQ``,
``QQ<sqrt(d)>``, ``QQ(a, b, ...)`` or ``QQ<sqrt(d)>(a, b, ...)``).  These
give exact arithmetic with canonical reduced fractions and an exact zero test.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping, Sequence

import sympy
from sympy import QQ
from sympy.polys.domains.domain import Domain

from .quadext import QuadExt

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ScalarError(ValueError):
    pass


@lru_cache(maxsize=None)
def coefficient_domain(params: tuple[str, ...] = (), radicand: int = 1) -> Domain:
    """The field ``Q(sqrt(radicand))(params)``."""
    for p in params:
        if not IDENT.match(p):
            raise ScalarError(f"invalid parameter name {p!r}")
    if len(set(params)) != len(params):
        raise ScalarError("duplicate parameter names")
    ground: Domain = QQ if radicand == 1 else QQ.algebraic_field(sympy.sqrt(radicand))
    if not params:
        return ground
    return ground.frac_field(*sympy.symbols(params))


def domain_params(K: Domain) -> tuple[str, ...]:
    if K.is_FractionField:
        return tuple(str(s) for s in K.symbols)
    return ()


def domain_ground(K: Domain) -> Domain:
    return K.dom if K.is_FractionField else K


def domain_radicand(K: Domain) -> int:
    g = domain_ground(K)
    if g.is_AlgebraicField:
        return int(g.ext.as_expr() ** 2)
    return 1


def merge_domains(K1: Domain, K2: Domain) -> Domain:
    if K1 == K2:
        return K1
    r1, r2 = domain_radicand(K1), domain_radicand(K2)
    if r1 != 1 and r2 != 1 and r1 != r2:
        raise ScalarError(f"radicand mismatch: {r1} vs {r2}")
    params = tuple(dict.fromkeys(domain_params(K1) + domain_params(K2)))
    return coefficient_domain(params, max(r1, r2))


def convert(K: Domain, x: Any, source: Domain | None = None) -> Any:
    """Bring ``x`` (int, Fraction, QuadExt, or an element of ``source``) into ``K``."""
    if source is not None:
        return x if source == K else K.convert_from(x, source)
    if isinstance(x, QuadExt):
        return from_qext(K, x)
    if isinstance(x, Fraction):
        return K.convert(QQ(x.numerator, x.denominator))
    if isinstance(x, int):
        return K.convert(x)
    return K.convert(x)


@lru_cache(maxsize=None)
def _sqrt_element(K: Domain, d: int) -> Any:
    return K.convert(sympy.sqrt(d))


def from_qext(K: Domain, q: QuadExt) -> Any:
    a = K.convert(QQ(q.a.numerator, q.a.denominator))
    if not q.b:
        return a
    if domain_radicand(K) != q.d:
        raise ScalarError(f"value {q} needs radicand {q.d}, field has {domain_radicand(K)}")
    return a + K.convert(QQ(q.b.numerator, q.b.denominator)) * _sqrt_element(K, q.d)


def to_qext(K: Domain, x: Any) -> QuadExt:
    """Inverse of :func:`from_qext` for parameter-free elements."""
    expr = sympy.nsimplify(K.to_sympy(x))
    d = domain_radicand(K)
    if d == 1:
        if not expr.is_Rational:
            raise ScalarError(f"{expr} is not rational")
        return QuadExt(Fraction(int(expr.p), int(expr.q)))
    s = sympy.sqrt(d)
    b = sympy.expand(expr).coeff(s)
    a = sympy.expand(expr - b * s)
    if not (a.is_Rational and b.is_Rational):
        raise ScalarError(f"{expr} is not in Q(sqrt({d}))")
    return QuadExt(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)), d)


def is_constant(K: Domain, x: Any) -> bool:
    if not K.is_FractionField:
        return True
    return x.numer.is_ground and x.denom.is_ground


def to_fraction(K: Domain, x: Any) -> Fraction:
    """Rational value of a parameter-free element over QQ."""
    if domain_radicand(K) != 1:
        q = to_qext(K, x)
        if q.b:
            raise ScalarError("irrational coefficient")
        return q.a
    if K.is_FractionField:
        if not is_constant(K, x):
            raise ScalarError("coefficient depends on parameters")
        n = x.numer.LC if x.numer else QQ(0)
        dd = x.denom.LC
        v = QQ.convert(n) / QQ.convert(dd)
    else:
        v = x
    return Fraction(int(v.numerator), int(v.denominator))


def _ground_float(g: Domain, c: Any) -> float:
    if g.is_AlgebraicField:
        return float(g.to_sympy(c))
    return float(c)


def _poly_float(poly: Any, g: Domain, point: Sequence[float]) -> float:
    acc = 0.0
    for monom, c in poly.terms():
        t = _ground_float(g, c)
        for v, e in zip(point, monom):
            if e:
                t *= v**e
        acc += t
    return acc


def to_float(K: Domain, x: Any, values: Mapping[str, float] | None = None) -> float:
    """Numerical value; every parameter of ``K`` must be assigned."""
    values = values or {}
    g = domain_ground(K)
    if not K.is_FractionField:
        return _ground_float(g, x)
    names = domain_params(K)
    missing = [n for n in names if n not in values]
    if missing and not is_constant(K, x):
        used = {str(s) for s in K.to_sympy(x).free_symbols}
        missing = [n for n in missing if n in used]
        if missing:
            raise ScalarError(f"unassigned parameter(s): {', '.join(missing)}")
    point = [float(values.get(n, 0.0)) for n in names]
    den = _poly_float(x.denom, g, point)
    if den == 0.0:
        raise ScalarError("coefficient denominator vanishes at the parameter assignment")
    return _poly_float(x.numer, g, point) / den


# ---------------------------------------------------------------------------
# coefficient grammar:  expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)*
#                       factor := ('-'|'+') factor | atom ('^' INT)? ; atom := INT | NAME | '(' expr ')'

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            if op not in "+-*/^()":
                raise ScalarError(f"unexpected character {op!r} in {text!r}")
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, K: Domain):
        self.toks = _tokenize(text)
        self.i = 0
        self.K = K
        self.names = {str(s): K.convert(s) for s in getattr(K, "symbols", ())}
        self.text = text

    def peek(self) -> tuple[str, str] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ScalarError(f"unexpected end of expression {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Any:
        if not self.toks:
            raise ScalarError("empty coefficient expression")
        v = self.expr()
        if self.peek() is not None:
            raise ScalarError(f"trailing input in {self.text!r}")
        return v

    def expr(self) -> Any:
        v = self.term()
        while (tok := self.peek()) in (("op", "+"), ("op", "-")):
            self.take()
            w = self.term()
            v = v + w if tok[1] == "+" else v - w
        return v

    def term(self) -> Any:
        v = self.factor()
        while (tok := self.peek()) in (("op", "*"), ("op", "/")):
            self.take()
            w = self.factor()
            if tok[1] == "*":
                v = v * w
            else:
                if not w:
                    raise ScalarError(f"division by zero in {self.text!r}")
                v = v / w
        return v

    def factor(self) -> Any:
        tok = self.peek()
        if tok in (("op", "-"), ("op", "+")):
            self.take()
            v = self.factor()
            return -v if tok[1] == "-" else v
        v = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ScalarError("exponent must be a non-negative integer")
            v = v ** int(val)
        return v

    def atom(self) -> Any:
        kind, val = self.take()
        if kind == "num":
            return self.K.convert(int(val))
        if kind == "name":
            if val not in self.names:
                raise ScalarError(f"unknown parameter {val!r}")
            return self.names[val]
        if val == "(":
            v = self.expr()
            if self.take() != ("op", ")"):
                raise ScalarError(f"missing ')' in {self.text!r}")
            return v
        raise ScalarError(f"unexpected {val!r} in {self.text!r}")


def parse_scalar(text: str, K: Domain) -> Any:
    """Parse a coefficient expression over rationals and the parameters of ``K``."""
    return _Parser(text, K).parse()


def _format_rational(c: Any) -> str:
    c = QQ.convert(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_poly(poly: Any, names: Sequence[str]) -> str:
    pieces: list[str] = []
    for monom, c in poly.terms():
        mon = "*".join(
            n if e == 1 else f"{n}^{e}" for n, e in zip(names, monom) if e
        )
        neg = c < 0
        mag = -c if neg else c
        if not mon:
            body = _format_rational(mag)
        elif mag == 1:
            body = mon
        else:
            body = f"{_format_rational(mag)}*{mon}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces) or "0"


def format_scalar(K: Domain, x: Any) -> str:
    """Canonical text for an element of ``QQ`` or ``QQ(params)``; inverse of :func:`parse_scalar`."""
    if domain_radicand(K) != 1:
        return str(K.to_sympy(x))
    if not K.is_FractionField:
        return _format_rational(x)
    names = domain_params(K)
    num, den = x.numer, x.denom
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    ns = _format_poly(num, names)
    if den.is_ground:
        return ns
    ds = _format_poly(den, names)
    if len(num.terms()) > 1:
        ns = f"({ns})"
    if len(den.terms()) > 1:
        ds = f"({ds})"
    return f"{ns}/{ds}"
