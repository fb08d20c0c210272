"""Command-line interface and the potential document format.

A potential document is a JSON object::

    {"dimension": 2, "radicand": 3, "parameters": ["a"],
     "terms": [{"frequency": [[2, 1, 0, 1], [0, 1, 0, 1]], "coefficient": "a"}]}

Each frequency coordinate is a quadruple ``[a_num, a_den, b_num, b_den]``
meaning ``a + b sqrt(radicand)``.  Coefficients use rationals, parameter
names, ``+ - * /`` and parentheses.  :func:`write_document` is canonical:
terms are sorted, fractions reduced, and the output ends with a newline.

Exit codes are 0 (pass), 2 (a check failed) and 1 (bad input or error).
Randomized rank tests use ``--seed`` (default 0).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Sequence

import sympy

from . import catalog, dynamics, expfield, integral_search, phasepoly, scalars, screening, tessellation
from .phasepoly import PhasePolynomial, _split_radical
from .potential import Potential, PotentialError, limit_potential
from .quadext import Frequency, QuadExt

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
DEFAULT_SEED = 0
BUNDLED = ("H1", "H2", "H3", "H4", "H5", "H6", "H7", "H8", "EQ1")


class DocumentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# potential documents


def _quad(x: QuadExt) -> list[int]:
    return [x.a.numerator, x.a.denominator, x.b.numerator, x.b.denominator]


def potential_to_document(V: Potential) -> dict[str, Any]:
    terms = []
    for k in V.sorted_support():
        terms.append({"frequency": [_quad(c) for c in k], "coefficient": scalars.format_scalar(V.domain, V.terms[k])})
    return {"dimension": V.n, "radicand": V.radicand, "parameters": list(V.params), "terms": terms}


def write_document(V: Potential) -> str:
    doc = potential_to_document(V)
    head = [f'  "{k}": {json.dumps(doc[k])},' for k in ("dimension", "radicand", "parameters")]
    terms = [f"    {json.dumps(t)}" for t in doc["terms"]]
    body = ",\n".join(terms)
    return "{\n" + "\n".join(head) + '\n  "terms": [\n' + body + ("\n" if terms else "") + "  ]\n}\n"


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DocumentError(f"{what} must be an integer, got {x!r}")
    return x


def document_to_potential(doc: Any) -> Potential:
    if not isinstance(doc, dict):
        raise DocumentError("document must be an object")
    missing = {"dimension", "radicand", "parameters", "terms"} - set(doc)
    if missing:
        raise DocumentError(f"missing fields: {sorted(missing)}")
    n = _int(doc["dimension"], "dimension")
    d = _int(doc["radicand"], "radicand")
    params = doc["parameters"]
    if not isinstance(params, list) or not all(isinstance(p, str) and p.isidentifier() for p in params):
        raise DocumentError("parameters must be a list of identifiers")
    if not isinstance(doc["terms"], list):
        raise DocumentError("terms must be a list")
    items = []
    for t in doc["terms"]:
        if not isinstance(t, dict) or not isinstance(t.get("frequency"), list) or not isinstance(t.get("coefficient"), str):
            raise DocumentError(f"malformed term {t!r}")
        coords = []
        for q in t["frequency"]:
            if not isinstance(q, list) or len(q) != 4:
                raise DocumentError(f"frequency coordinate {q!r} is not a quadruple")
            an, ad, bn, bd = (_int(v, "frequency entry") for v in q)
            if ad == 0 or bd == 0:
                raise DocumentError("zero denominator in frequency")
            b = Fraction(bn, bd)
            if b and d == 1:
                raise DocumentError("irrational part with radicand 1")
            coords.append(QuadExt(Fraction(an, ad), b, d) if b else QuadExt(Fraction(an, ad)))
        items.append((Frequency(coords), t["coefficient"]))
    try:
        V = Potential(n, items, params=params)
    except (PotentialError, scalars.ScalarError, ValueError) as exc:
        raise DocumentError(str(exc)) from exc
    if V.radicand not in (1, d):
        raise DocumentError(f"frequencies use sqrt({V.radicand}) but radicand is {d}")
    return V


def read_document(text: str) -> Potential:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    return document_to_potential(doc)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("torusint") / "data" / f"{name}.json"))


def load_potential(source: str) -> Potential:
    """Read a document from a path, or a bundled fixture by name (``H1`` .. ``H8``, ``EQ1``)."""
    path = Path(source)
    if not path.exists() and source in BUNDLED:
        path = bundled_path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {source}: {exc}") from exc
    return read_document(text)


def bundled_potentials() -> dict[str, Potential]:
    out = dict(catalog.POTENTIALS)
    out["EQ1"] = catalog.EQ1
    return out


def parse_qext(text: str) -> QuadExt:
    """``3``, ``-1/2``, ``2*sqrt(3)`` or ``1 - sqrt(2)/3``."""
    try:
        expr = sympy.sympify(text, rational=True)
    except (sympy.SympifyError, TypeError, SyntaxError) as exc:
        raise DocumentError(f"cannot parse number {text!r}") from exc
    if expr.free_symbols:
        raise DocumentError(f"{text!r} is not a number")
    rads = {int(p.base) for p in expr.atoms(sympy.Pow) if p.exp == sympy.Rational(1, 2) and p.base.is_Integer}
    if len(rads) > 1:
        raise DocumentError(f"{text!r} mixes radicands")
    try:
        return _split_radical(expr, rads.pop() if rads else 1)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


def parse_vector(text: str) -> list[QuadExt]:
    return [parse_qext(s) for s in text.split(",")]


def parse_floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise DocumentError(f"cannot parse vector {text!r}") from exc


def parse_params(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items:
        name, sep, val = item.partition("=")
        if not sep:
            raise DocumentError(f"parameter {item!r} is not of the form name=value")
        try:
            out[name.strip()] = float(val)
        except ValueError as exc:
            raise DocumentError(f"parameter value {val!r} is not a number") from exc
    return out


# ---------------------------------------------------------------------------
# reports


def _freq(k: Frequency) -> list[str]:
    return [str(c) for c in k]


def screening_document(V: Potential, rep: screening.ScreeningReport) -> dict[str, Any]:
    return {
        "command": "screen",
        "passed": rep.overall,
        "failed_conditions": rep.failed(),
        "verdicts": {str(c): v.value for c, v in sorted(rep.verdicts.items())},
        "witnesses": [
            {"condition": w.condition, "points": [_freq(k) for k in w.points], "detail": w.detail}
            for c in sorted(rep.witnesses)
            for w in rep.witnesses[c]
        ],
        "summits": [_freq(k) for k in rep.hull.summits],
        "edges": [
            {"summits": [i, j], "angle": cls.label} for i, j, cls in rep.edge_classes
        ],
    }


def _human_screen(doc: dict[str, Any]) -> str:
    lines = [f"summits: {len(doc['summits'])}"]
    for c, v in doc["verdicts"].items():
        lines.append(f"condition {c}: {v}")
    for w in doc["witnesses"]:
        lines.append(f"  witness for {w['condition']}: {w['detail']}")
    lines.append("PASS" if doc["passed"] else "FAIL")
    return "\n".join(lines)


def _poly_text(F: PhasePolynomial) -> str:
    # sympy text parses back with phasepoly.from_sympy
    return str(phasepoly.to_sympy(F))


def _emit(args: argparse.Namespace, doc: dict[str, Any], human: Callable[[dict[str, Any]], str]) -> None:
    if args.format == "structured":
        print(json.dumps(doc, indent=2))
    else:
        print(human(doc))


def _generic_human(doc: dict[str, Any]) -> str:
    lines = []
    for k, v in doc.items():
        if isinstance(v, list):
            lines.append(f"{k}:")
            lines.extend(f"  {x}" for x in v)
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def cmd_screen(args: argparse.Namespace) -> int:
    V = load_potential(args.file)
    rep = screening.screen(V)
    doc = screening_document(V, rep)
    _emit(args, doc, _human_screen)
    return EXIT_PASS if rep.overall else EXIT_FAIL


def cmd_limit(args: argparse.Namespace) -> int:
    V = load_potential(args.file)
    v = parse_vector(args.direction)
    try:
        W = limit_potential(V, v)
    except PotentialError as exc:
        raise DocumentError(str(exc)) from exc
    sys.stdout.write(write_document(W))
    return EXIT_PASS


def cmd_verify(args: argparse.Namespace) -> int:
    if args.id not in catalog.POTENTIALS:
        raise DocumentError(f"unknown catalog id {args.id!r}; expected one of {catalog.catalog_ids()}")
    e = catalog.entry(args.id)
    cert = integral_search.check_commuting_independent(list(e.integrals), seed=args.seed)
    doc = {
        "command": "verify",
        "id": args.id,
        "passed": cert.passed,
        "commuting": cert.commuting,
        "independent": cert.independent,
        "failing_pair": list(cert.failing_pair) if cert.failing_pair else None,
        "ranks": cert.ranks,
        "required": cert.required,
        "method": cert.method,
        "seed": args.seed,
        "integrals": [_poly_text(F) for F in e.integrals],
    }
    _emit(args, doc, _generic_human)
    return EXIT_PASS if cert.passed else EXIT_FAIL


def cmd_search(args: argparse.Namespace) -> int:
    V = load_potential(args.file)
    if args.degree < 0:
        raise DocumentError("degree must be non-negative")
    F = integral_search.default_frequency_set(V, args.closure_m)
    try:
        basis = integral_search.search_first_integrals(V, args.degree, F)
    except integral_search.AnsatzClosureError as exc:
        raise DocumentError(f"{exc}; increase --closure-m") from exc
    extra = integral_search.new_integrals(basis)
    doc = {
        "command": "search",
        "degree": args.degree,
        "closure_m": args.closure_m,
        "ansatz_size": len(basis.descriptor),
        "dimension": basis.dimension,
        "basis": [_poly_text(P) for P in basis.elements],
        "new_integrals": [_poly_text(P) for P in extra],
    }
    _emit(args, doc, _generic_human)
    return EXIT_PASS


def _summits_doc(s: tessellation.SummitSet) -> dict[str, Any]:
    return {"vectors": [[str(c) for c in v] for v in s.vectors], "free": [str(x) for x in s.free]}


def cmd_tessellate(args: argparse.Namespace) -> int:
    if args.dim == 2:
        covs = tessellation.circle_coverings()
        doc = {
            "command": "tessellate",
            "dimension": 2,
            "count": len(covs),
            "coverings": [str(c) for c in covs],
        }
        if args.realize:
            doc["summit_sets"] = {str(c): [_summits_doc(s) for s in tessellation.realize_summit_sets(c)] for c in covs}
    elif args.dim == 3:
        cands = tessellation.enumerate_sphere_candidates()
        final = tessellation.gluing_filter(cands)
        doc = {
            "command": "tessellate",
            "dimension": 3,
            "triangles": [str(t) for t in tessellation.enumerate_admissible_triangles()],
            "candidates": [str(c) for c in cands],
            "count": len(final),
            "tessellations": [str(c) for c in final],
            "rejected": [str(c) for c in cands if c not in final],
        }
        if args.realize:
            doc["summit_sets"] = {str(c): [_summits_doc(s) for s in tessellation.realize_summit_sets(c)] for c in final}
    else:
        raise DocumentError("dimension must be 2 or 3")
    _emit(args, doc, _generic_human)
    return EXIT_PASS


def read_expint(text: str) -> tuple[expfield.ExpFieldFunction, expfield.Assumptions]:
    """An expint file is JSON with ``variables``, ``rates``, ``P`` and optional
    ``factors`` (``[[Q, alpha], ...]``), ``betas`` and ``assumptions``
    (``{"gamma": [1, 2]}`` meaning ``N gamma`` is not an integer for each listed N)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not {"variables", "rates", "P"} <= set(doc):
        raise DocumentError("expint file needs variables, rates and P")
    try:
        f = expfield.ExpFieldFunction.build(
            doc["variables"],
            [str(r) for r in doc["rates"]],
            str(doc["P"]),
            [(str(q), str(a)) for q, a in doc.get("factors", [])],
            [str(b) for b in doc["betas"]] if "betas" in doc else None,
        )
        facts = {k: tuple(int(n) for n in v) for k, v in doc.get("assumptions", {}).items()}
    except (ValueError, TypeError, SyntaxError, sympy.SympifyError) as exc:
        raise DocumentError(str(exc)) from exc
    return f, expfield.Assumptions(facts)


def cmd_expint(args: argparse.Namespace) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {args.file}: {exc}") from exc
    f, assumptions = read_expint(text)
    doc: dict[str, Any] = {"command": "expint", "input": str(f.to_sympy())}
    try:
        g = expfield.integrate_in_field(f, assumptions)
    except expfield.SlackExhaustedError as exc:
        doc.update(result="inconclusive", detail=str(exc))
        _emit(args, doc, _generic_human)
        return EXIT_FAIL
    if g is None:
        doc.update(result="none", certified=True)
        code = EXIT_FAIL
    else:
        doc.update(result="integral", integral=str(sympy.simplify(g.to_sympy())))
        code = EXIT_PASS
    _emit(args, doc, _generic_human)
    return code


def _matching_entry(V: Potential) -> catalog.CatalogEntry | None:
    for cid, W in catalog.POTENTIALS.items():
        if W == V:
            return catalog.entry(cid)
    return None


def cmd_simulate(args: argparse.Namespace) -> int:
    V = load_potential(args.file)
    params = parse_params(args.param)
    if set(V.params) - set(params):
        raise DocumentError(f"missing parameter values: {sorted(set(V.params) - set(params))}")
    p0 = parse_floats(args.p) if args.p else [0.0] * V.n
    q0 = parse_floats(args.q) if args.q else [0.0] * V.n
    try:
        traj = dynamics.flow(V, params, (p0, q0), args.duration, args.step, args.sample_every)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    e = _matching_entry(V)
    Fs = list(e.integrals) if e is not None else [V.hamiltonian()]
    drift = dynamics.conservation_report(Fs, traj, params)
    if args.trajectory:
        with open(args.trajectory, "w") as fh:
            for rec in traj.records():
                fh.write(rec + "\n")
    doc = {
        "command": "simulate",
        "catalog_id": e.id if e is not None else None,
        "duration": args.duration,
        "step": args.step,
        "samples": len(traj),
        "final_p": [float(x) for x in traj.p[-1]],
        "final_q": [float(x) for x in traj.q[-1]],
        "drift": drift,
        "tolerance": args.tolerance,
        "passed": max(drift) < args.tolerance,
    }
    _emit(args, doc, _generic_human)
    return EXIT_PASS if doc["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized rank tests (default 0)")

    ap = argparse.ArgumentParser(prog="torusint", description="Integrability tools for exponential potentials on tori.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("screen", parents=[common], help="check the necessary conditions on the support")
    s.add_argument("file", help="potential document, or a bundled name such as H1 or EQ1")
    s.set_defaults(func=cmd_screen)

    s = sub.add_parser("limit", parents=[common], help="limit potential in direction v")
    s.add_argument("file")
    s.add_argument("direction", help="comma separated, e.g. 1,sqrt(3)")
    s.set_defaults(func=cmd_limit)

    s = sub.add_parser("verify", parents=[common], help="commutation and independence of a catalog entry")
    s.add_argument("id", help="catalog id H1 .. H8")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[common], help="polynomial first integrals of bounded degree")
    s.add_argument("file")
    s.add_argument("--degree", type=int, default=2)
    s.add_argument("--closure-m", type=int, default=1, help="frequencies are sums of at most m support elements")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("tessellate", parents=[common], help="list admissible coverings (2) or tessellations (3)")
    s.add_argument("dim", type=int)
    s.add_argument("--realize", action="store_true", help="also list summit sets")
    s.set_defaults(func=cmd_tessellate)

    s = sub.add_parser("expint", parents=[common], help="integrate inside an exponential field")
    s.add_argument("file")
    s.set_defaults(func=cmd_expint)

    s = sub.add_parser("simulate", parents=[common], help="RK4 flow and drift of the known integrals")
    s.add_argument("file")
    s.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    s.add_argument("--p", help="initial momenta, comma separated")
    s.add_argument("--q", help="initial positions, comma separated")
    s.add_argument("--step", type=float, default=dynamics.DEFAULT_STEP)
    s.add_argument("--duration", type=float, default=dynamics.DEFAULT_DURATION)
    s.add_argument("--sample-every", type=int, default=1)
    s.add_argument("--tolerance", type=float, default=1e-6)
    s.add_argument("--trajectory", help="write line-delimited records here")
    s.set_defaults(func=cmd_simulate)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (DocumentError, screening.ScreeningError, PotentialError, dynamics.FlowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
