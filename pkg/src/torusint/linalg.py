"""Exact kernels of sparse linear systems over the coefficient fields.

Over ``QQ`` and ``QQ<sqrt(d)>`` the reduced row echelon form is computed
directly.  Over parameter fields every row is cleared of denominators and
reduced fraction-free in the polynomial ring, so no rational function is
ever formed during elimination.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix

Row = Mapping[int, Any]


def _as_ring_rows(rows: Sequence[Row], K: Domain) -> tuple[list[dict[int, Any]], Domain]:
    R = K.get_ring()
    out = []
    for row in rows:
        den = R.one
        for c in row.values():
            den = R.lcm(den, c.denom)
        out.append({j: R.convert_from(c * K.convert_from(den, R), K) for j, c in row.items() if c})
    return out, R


def echelon(rows: Sequence[Row], ncols: int, K: Domain) -> tuple[list[dict[int, Any]], Any, tuple[int, ...], Domain]:
    """Row echelon data ``(R, den, pivots, ring)`` with ``R/den`` the reduced form."""
    rows = [r for r in rows if any(r.values())]
    if K.is_FractionField:
        ring_rows, ring = _as_ring_rows(rows, K)
        M = DomainMatrix({i: r for i, r in enumerate(ring_rows) if r}, (len(ring_rows), ncols), ring)
        Rm, den, pivots = M.rref_den(method="FF", keep_domain=True)
    else:
        ring = K
        M = DomainMatrix({i: dict(r) for i, r in enumerate(rows)}, (len(rows), ncols), K)
        Rm, pivots = M.rref()
        den = K.one
    sdm = Rm.to_sdm()
    R = [dict(sdm.get(i, {})) for i in range(len(pivots))]
    return R, den, tuple(pivots), ring


def nullspace(rows: Sequence[Row], ncols: int, K: Domain) -> list[dict[int, Any]]:
    """Basis of ``{x : row . x = 0 for every row}`` as sparse vectors over ``K``.

    One vector per free column ``f``, with ``x[f] = 1`` and zeros on the other
    free columns, so the basis is in reduced echelon form.
    """
    if not rows:
        return [{j: K.one} for j in range(ncols)]
    R, den, pivots, ring = echelon(rows, ncols, K)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        vec = {f: K.one}
        for i, p in enumerate(pivots):
            c = R[i].get(f)
            if c:
                val = K.convert_from(c, ring) / K.convert_from(den, ring) if ring != K else c / den
                vec[p] = -val
        basis.append(vec)
    return basis


def rank(rows: Sequence[Row], ncols: int, K: Domain) -> int:
    if not rows:
        return 0
    return len(echelon(rows, ncols, K)[2])


def solve(rows: Sequence[Row], rhs: Sequence[Any], ncols: int, K: Domain) -> dict[int, Any] | None:
    """One solution of ``rows . x = rhs`` with every free column set to 0, or None."""
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[ncols] = b
        aug.append(r)
    if not any(aug):
        return {}
    R, den, pivots, ring = echelon(aug, ncols + 1, K)
    if ncols in pivots:
        return None
    x = {}
    for i, p in enumerate(pivots):
        c = R[i].get(ncols)
        if c:
            x[p] = K.convert_from(c, ring) / K.convert_from(den, ring) if ring != K else c / den
    return x
