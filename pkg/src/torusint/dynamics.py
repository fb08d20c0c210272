"""Numerical flows, conservation checks and the rational torus parametrizations."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterator, Mapping, Sequence

import mpmath
import numpy as np
import sympy

from . import scalars
from .catalog import RATIONAL_CASES, CatalogEntry
from .phasepoly import PhasePolynomial
from .potential import Potential

DEFAULT_STEP = 1e-3
DEFAULT_DURATION = 10.0


class FlowError(ArithmeticError):
    def __init__(self, time: float, message: str = ""):
        super().__init__(message or f"non-finite state at t = {time:.6g}")
        self.time = time


@dataclass
class Trajectory:
    times: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def records(self) -> Iterator[str]:
        """Line-delimited JSON records ``{"t": ..., "p": [...], "q": [...]}``."""
        for t, p, q in zip(self.times, self.p, self.q):
            yield json.dumps({"t": float(t), "p": [float(x) for x in p], "q": [float(x) for x in q]})


def _gradient(V: Potential, params: Mapping[str, float] | None) -> Callable[[np.ndarray], np.ndarray]:
    keys = V.sorted_support()
    K = np.array([k.to_floats() for k in keys], dtype=float).reshape(-1, V.n)
    a = np.array([scalars.to_float(V.domain, V.terms[k], params) for k in keys])

    def grad(q: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return K.T @ (a * np.exp(K @ q))

    return grad


def flow(
    V: Potential,
    params: Mapping[str, float] | None,
    state0: tuple[Sequence[float], Sequence[float]],
    T: float = DEFAULT_DURATION,
    h: float = DEFAULT_STEP,
    sample_every: int = 1,
) -> Trajectory:
    """Classical RK4 for ``q' = p, p' = -grad V`` in the real normal form."""
    if h <= 0 or T < 0:
        raise ValueError("step must be positive and duration non-negative")
    grad = _gradient(V, params)
    p = np.array(state0[0], dtype=float)
    q = np.array(state0[1], dtype=float)
    if p.shape != (V.n,) or q.shape != (V.n,):
        raise ValueError(f"initial state must have dimension {V.n}")
    steps = int(round(T / h))
    times, ps, qs = [0.0], [p.copy()], [q.copy()]
    for k in range(1, steps + 1):
        k1q, k1p = p, -grad(q)
        k2q, k2p = p + 0.5 * h * k1p, -grad(q + 0.5 * h * k1q)
        k3q, k3p = p + 0.5 * h * k2p, -grad(q + 0.5 * h * k2q)
        k4q, k4p = p + h * k3p, -grad(q + h * k3q)
        q = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise FlowError(k * h)
        if k % sample_every == 0 or k == steps:
            times.append(k * h)
            ps.append(p.copy())
            qs.append(q.copy())
    return Trajectory(np.array(times), np.array(ps), np.array(qs))


def conservation_report(
    entry: CatalogEntry | Sequence[PhasePolynomial],
    trajectory: Trajectory,
    params: Mapping[str, float] | None = None,
) -> list[float]:
    """Max ``|F(state) - F(state_0)|`` along the samples, per integral."""
    Fs = entry.integrals if isinstance(entry, CatalogEntry) else entry
    out = []
    for F in Fs:
        vals = F.compile(params)(trajectory.p, trajectory.q)
        out.append(float(np.max(np.abs(vals - vals[0]))))
    return out


def flip_term_sign(F: PhasePolynomial, index: int = 0) -> PhasePolynomial:
    """``F`` with the sign of its ``index``-th exponential term reversed."""
    keys = [k for k, _ in F.sorted_terms() if not k[1].is_zero()]
    key = keys[index]
    terms = dict(F.terms)
    terms[key] = -terms[key]
    return PhasePolynomial(F.n, F.domain, terms)


def energy_drift(V: Potential, params: Mapping[str, float] | None, state0: tuple, T: float, h: float) -> float:
    traj = flow(V, params, state0, T, h)
    return conservation_report([V.hamiltonian()], traj, params)[0]


# ---------------------------------------------------------------------------
# rational torus parametrizations (complex form, x = exp(i lam t), y = exp(i mu t))

_SOLUTIONS: dict[str, dict[str, Any]] = {
    "H1": {
        "catalog": "R1",
        "time_sign": -1,
        "frequencies": ((1, "sqrt(3)"), (1, "-sqrt(3)")),
        "levels": ("(lam**2 - lam*mu + mu**2)/6", "sqrt(3)/18*(lam - 2*mu)*(2*lam - mu)*(lam + mu)"),
        "stages": [
            {
                "p2": "(2*x*(y-1)**2*lam**3 + mu*(y-1)*(x**2-3*x*y+3*x-y)*lam**2 - mu**2*(x-1)*(3*x*y-y**2+x-3*y)*lam"
                " + 2*mu**3*y*(x-1)**2) / (2*sqrt(3)*((y-1)*lam - mu*(x-1))*(x*(y-1)*lam - mu*y*(x-1)))",
                "p1": "(y-1)*(x-1)*(x-y)*(lam-mu)*lam*mu / (2*(mu*(x-1) - (y-1)*lam)*(x*(y-1)*lam - mu*y*(x-1)))",
            },
            {
                "e1": "-(sqrt(3)*p2 + 2*lam - mu + 3*p1)*(sqrt(3)*p2 - lam + 2*mu + 3*p1)*(sqrt(3)*p2 - lam - mu + 3*p1)/(108*p1)",
                "e2": "(sqrt(3)*p2 - lam + 2*mu - 3*p1)*(sqrt(3)*p2 - lam - mu - 3*p1)*(sqrt(3)*p2 + 2*lam - mu - 3*p1)/(108*p1)",
            },
        ],
    },
    "H2": {
        "catalog": "R2",
        "time_sign": -1,
        "frequencies": ((1, 0), (-1, 1)),
        "levels": ("(lam**2 + mu**2)/2", "lam**2*mu**2"),
        "stages": [
            {
                "v": "4*(mu-lam)*(lam+mu)*(lam*y - mu*x - lam + mu)*(lam*x*y - lam*x - mu*x + mu)"
                "*(lam*x*y - mu*x*y - lam*x + mu*y)*(-mu*x*y + lam*y + mu*y - lam)"
                " / ((lam**2*x*y**2 - mu**2*x**2*y - 2*lam**2*x*y + 2*mu**2*x*y + lam**2*x - mu**2*y)"
                "*(lam*x*y - mu*x*y - lam*x + lam*y - mu*x + mu*y - lam + mu)**2)",
                "u": "(lam-mu)*(lam+mu)*(y-1)*(x-1) / (lam*x*y - mu*x*y - lam*x + lam*y - mu*x + mu*y - lam + mu)",
            },
            {
                "e2": "(u**2 - lam**2 + mu**2 + 2*mu*u - v)*(lam**2 - mu**2 + 2*mu*u - u**2 + v)"
                "*(lam**2 - 2*lam*u - mu**2 + u**2 - v)*(lam**2 + 2*lam*u - mu**2 + u**2 - v)/(16*u**2*v**2)",
                "p1": "(lam**4 - 2*lam**2*mu**2 - 2*lam**2*u**2 + mu**4 - 2*mu**2*u**2 + u**4 + 4*u**2*v - v**2)/(4*u*v)",
                "p2": "-(lam**4 - 2*lam**2*mu**2 - 2*lam**2*u**2 + mu**4 - 2*mu**2*u**2 + u**4 - v**2)/(4*u*v)",
                "e1": "-(u + lam + mu)*(lam + mu - u)*(lam - mu - u)*(lam - mu + u)/(2*v)",
            },
        ],
    },
    "H3": {
        "catalog": "R3",
        "time_sign": -1,
        "frequencies": (("2*sqrt(3)", 0), ("-sqrt(3)", -1)),
        "levels": (
            "(lam**2 + lam*mu + mu**2)/6",
            "-(lam - mu)**2*(2*mu + lam)**2*(mu + 2*lam)**2/108",
        ),
        "stages": [
            {
                "D": "2*lam**3*x*(y-1)**2 - 2*y*(x-1)**2*mu**3 - lam*(x-1)*(x*y**2 + 3*x*y - 3*y - 1)*mu**2"
                " + lam**2*(y-1)*(x**2*y + 3*x*y - 3*x - 1)*mu",
            },
            {
                "u": "3*(x-1)*(y-1)*(x*y-1)*(lam+mu)*lam*mu/D",
                "v": "2*((1-x)*mu + lam*x*(y-1))*(lam*(y-1) - y*(x-1)*mu)/D",
            },
            {
                "P": "(lam*v + 2*mu*v - 1)*(2*lam*v + mu*v + 1)*(lam*v - mu*v - 1)",
                "W": "8*lam**3*v**3 + 12*lam**2*mu*v**3 - 12*lam*mu**2*v**3 - 8*mu**3*v**3"
                " - 6*lam**2*v**2 - 6*lam*mu*v**2 - 6*mu**2*v**2 - 2",
            },
            {
                "Q": "P*(14*lam**3*v**3 + 21*lam**2*mu*v**3 - 21*lam*mu**2*v**3 - 14*mu**3*v**3"
                " - 3*lam**2*v**2 - 3*lam*mu*v**2 - 3*mu**2*v**2 - 3)",
            },
            {
                # P(v)^2 in the denominator, as for e1; a single P(v) fails the level check
                "p1": "(u**6 - (18*lam**3*v**3 + 27*lam**2*mu*v**3 - 27*lam*mu**2*v**3 - 18*mu**3*v**3"
                " + 3*lam**2*v**2 + 3*lam*mu*v**2 + 3*mu**2*v**2 + 3)*u**4 - Q*u**2 - P**3)"
                " / (4*sqrt(3)*u*v*(u**4 + W*u**2 + P**2))",
                "e1": "u**2*v*(mu-lam)*(2*mu+lam)*(mu+2*lam)*((2*lam*v + mu*v + 1)**2 - u**2)"
                "*((lam*v + 2*mu*v - 1)**2 - u**2)*((lam*v - mu*v - 1)**2 - u**2) / (3*(u**4 + W*u**2 + P**2)**2)",
                "e2": "-u**2/(72*v**2) - (4*lam**3*v**3 + 6*lam**2*mu*v**3 - 6*lam*mu**2*v**3 - 4*mu**3*v**3"
                " - 3*lam**2*v**2 - 3*lam*mu*v**2 - 3*mu**2*v**2 - 1)/(36*v**2) - P**2/(72*v**2*u**2)",
                "p2": "u/(12*v) - P/(12*u*v)",
            },
        ],
    },
}


def _sym(text: str) -> sympy.Expr:
    names = set(re.findall(r"[A-Za-z_][A-Za-z0-9_]*", text)) - {"sqrt"}
    return sympy.sympify(text, locals={n: sympy.Symbol(n) for n in names})


@dataclass
class TorusParametrization:
    """A closed-form solution family on the level set ``M_{lam, mu}``.

    The stored maps are staged: each stage may use the names defined by the
    previous ones.  Some stored maps solve Hamilton's equations with time
    reversed; ``time_sign`` records the direction, and the map is evaluated
    at ``x = c_x exp(i time_sign lam t)``.  The unit phases ``c_x, c_y`` (the
    Galois action) move ``t = 0`` off the pole at ``x = y = 1``.
    """

    case: str
    catalog_id: str
    frequencies: np.ndarray
    level_exprs: tuple[sympy.Expr, sympy.Expr]
    stages: list[dict[str, sympy.Expr]]
    time_sign: int = 1

    @classmethod
    def load(cls, case: str) -> "TorusParametrization":
        data = _SOLUTIONS[case]
        freqs = np.array([[float(sympy.N(_sym(str(c)))) for c in k] for k in data["frequencies"]])
        levels = tuple(_sym(s) for s in data["levels"])
        stages = [{k: _sym(v) for k, v in st.items()} for st in data["stages"]]
        return cls(case, data["catalog"], freqs, levels, stages, data["time_sign"])

    @cached_property
    def _compiled(self) -> list[dict[str, Callable]]:
        names = ["lam", "mu", "x", "y"]
        out = []
        for st in self.stages:
            syms = sympy.symbols(names)
            out.append({k: sympy.lambdify(syms, e, "numpy") for k, e in st.items()})
            names = names + list(st)
        return out

    @cached_property
    def _levels(self) -> Callable:
        return sympy.lambdify(sympy.symbols("lam mu"), list(self.level_exprs), "numpy")

    @cached_property
    def _integrals(self) -> tuple[Callable, Callable]:
        h, i, _ = RATIONAL_CASES[self.catalog_id]
        syms = sympy.symbols("p1 p2 q1 q2")
        conv = {"exp": lambda z: sympy.exp(sympy.I * z)}
        H = sympy.sympify(h).replace(sympy.exp, conv["exp"])
        I = sympy.sympify(i).replace(sympy.exp, conv["exp"])
        return sympy.lambdify(syms, H, "numpy"), sympy.lambdify(syms, I, "numpy")

    def levels(self, lam: float, mu: float) -> tuple[complex, complex]:
        return tuple(complex(v) for v in self._levels(lam, mu))

    def state(self, lam: float, mu: float, t: float, phases: tuple[complex, complex] = (1, 1)) -> np.ndarray:
        """``(p1, p2, e1, e2)`` at time ``t``."""
        x = phases[0] * np.exp(1j * self.time_sign * lam * t)
        y = phases[1] * np.exp(1j * self.time_sign * mu * t)
        env: list[complex] = [complex(lam), complex(mu), x, y]
        named: dict[str, complex] = {}
        for st in self._compiled:
            vals = {k: complex(f(*env)) for k, f in st.items()}
            named.update(vals)
            env = env + list(vals.values())
        return np.array([named["p1"], named["p2"], named["e1"], named["e2"]])

    def q_of(self, e: np.ndarray) -> np.ndarray:
        """Complex ``q`` with ``exp(i k_j . q) = e_j``."""
        return np.linalg.solve(self.frequencies, -1j * np.log(e))

    def integral_values(self, S: np.ndarray) -> tuple[complex, complex]:
        q = self.q_of(S[2:])
        fH, fI = self._integrals
        return complex(fH(S[0], S[1], q[0], q[1])), complex(fI(S[0], S[1], q[0], q[1]))

    @cached_property
    def _mp(self) -> tuple[list[dict[str, Callable]], Callable, Callable, mpmath.matrix]:
        names = ["lam", "mu", "x", "y"]
        stages = []
        for st in self.stages:
            syms = sympy.symbols(names)
            stages.append({k: sympy.lambdify(syms, e, "mpmath") for k, e in st.items()})
            names = names + list(st)
        h, i, _ = RATIONAL_CASES[self.catalog_id]
        syms = sympy.symbols("p1 p2 q1 q2")
        H = sympy.sympify(h).replace(sympy.exp, lambda z: sympy.exp(sympy.I * z))
        I = sympy.sympify(i).replace(sympy.exp, lambda z: sympy.exp(sympy.I * z))
        K = mpmath.matrix([[mpmath.mpf(sympy.N(_sym(str(c)), 60)) for c in k] for k in _SOLUTIONS[self.case]["frequencies"]])
        return stages, sympy.lambdify(syms, H, "mpmath"), sympy.lambdify(syms, I, "mpmath"), K

    def level_residuals(self, lam: float, mu: float, t: float, phases: tuple[complex, complex] = (1, 1), dps: int = 40) -> tuple[float, float]:
        """Relative level-set residuals, evaluated in extended precision."""
        stages, fH, fI, K = self._mp
        with mpmath.workdps(dps):
            lm, m = mpmath.mpf(lam), mpmath.mpf(mu)
            x = mpmath.mpc(phases[0]) * mpmath.expj(self.time_sign * lm * t)
            y = mpmath.mpc(phases[1]) * mpmath.expj(self.time_sign * m * t)
            env = [lm, m, x, y]
            named = {}
            for st in stages:
                vals = {k: f(*env) for k, f in st.items()}
                named.update(vals)
                env = env + list(vals.values())
            logs = mpmath.matrix([-1j * mpmath.log(named["e1"]), -1j * mpmath.log(named["e2"])])
            q = mpmath.lu_solve(K, logs)
            got = (fH(named["p1"], named["p2"], q[0], q[1]), fI(named["p1"], named["p2"], q[0], q[1]))
            target = [mpmath.mpf(sympy.N(e.subs({"lam": sympy.Rational(lam), "mu": sympy.Rational(mu)}), dps)) for e in self.level_exprs]
            return tuple(float(abs(g - v) / max(1, abs(v))) for g, v in zip(got, target))

    def vector_field(self, S: np.ndarray) -> np.ndarray:
        """Hamilton's equations for ``(p, e)``: ``p' = -i sum k_j e_j``, ``e_j' = i (k_j . p) e_j``."""
        p, e = S[:2], S[2:]
        return np.concatenate([-1j * (self.frequencies.T @ e), 1j * (self.frequencies @ p) * e])


@dataclass
class ParametrizationSample:
    lam: float
    mu: float
    t: float
    level_residuals: tuple[float, float]
    hamilton_residual: float


@dataclass
class ParametrizationReport:
    case: str
    samples: list[ParametrizationSample] = field(default_factory=list)
    resampled: int = 0

    @property
    def max_level_residual(self) -> float:
        return max(max(s.level_residuals) for s in self.samples)

    @property
    def max_hamilton_residual(self) -> float:
        return max(s.hamilton_residual for s in self.samples)

    def passed(self, level_tol: float = 1e-9, hamilton_tol: float = 1e-6) -> bool:
        return self.max_level_residual < level_tol and self.max_hamilton_residual < hamilton_tol


def verify_parametrization(
    tp: TorusParametrization | str,
    trials: int = 20,
    seed: int = 0,
    h: float = 1e-3,
    phases: bool = True,
) -> ParametrizationReport:
    """Level-set residuals (extended precision) and 5-point finite-difference residuals, both relative.

    The first draw is taken at ``t = 0``.  Samples that land on a pole of
    the map (non-finite values or blow-up beyond 1e8) are drawn again.  The
    difference step is capped by the local time scale ``|S|/|S'|`` so that
    samples close to a pole are not dominated by truncation error.
    """
    if isinstance(tp, str):
        tp = TorusParametrization.load(tp)
    rng = np.random.default_rng(seed)
    report = ParametrizationReport(tp.case)
    while len(report.samples) < trials:
        if report.resampled > 50 * trials:
            raise ArithmeticError(f"{tp.case}: too many samples landed on poles")
        lam, mu = rng.uniform(0.4, 1.6, size=2) * rng.choice([-1.0, 1.0], size=2)
        first = not report.samples and not report.resampled
        t = 0.0 if first else float(rng.uniform(-3.0, 3.0))
        ph = tuple(np.exp(2j * np.pi * rng.random(2))) if phases else (1.0, 1.0)
        if abs(abs(lam) - abs(mu)) < 0.05:
            continue
        with np.errstate(all="ignore"):
            try:
                S = tp.state(lam, mu, t, ph)
                rhs = tp.vector_field(S)
                # local time scale |S|/|S'| shrinks near a pole
                scale = float(np.max(np.abs(S)) / max(float(np.max(np.abs(rhs))), 1e-300))
                step = min(h, 0.01 * scale)
                pts = [tp.state(lam, mu, t + k * step, ph) for k in (-2, -1, 0, 1, 2)]
            except ZeroDivisionError:
                pts = None
        if pts is None or not all(np.all(np.isfinite(P)) and np.max(np.abs(P)) < 1e8 for P in pts):
            report.resampled += 1
            continue
        if np.min(np.abs(S[2:])) < 1e-8:
            report.resampled += 1
            continue
        lev = tp.level_residuals(float(lam), float(mu), t, ph)
        dS = (pts[0] - 8 * pts[1] + 8 * pts[3] - pts[4]) / (12 * step)
        ham = float(np.max(np.abs(dS - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))
        report.samples.append(ParametrizationSample(float(lam), float(mu), t, lev, ham))
    return report


def parametrization_cases() -> list[str]:
    return list(_SOLUTIONS)
