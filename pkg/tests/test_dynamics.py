import json

import numpy as np
import pytest

from torusint import catalog
from torusint.dynamics import (
    FlowError,
    TorusParametrization,
    conservation_report,
    energy_drift,
    flip_term_sign,
    flow,
    parametrization_cases,
    verify_parametrization,
)
from torusint.phasepoly import from_sympy
from torusint.potential import Potential

PARAMS = {"alpha": 1.0, "beta": 0.5}


def moderate_state(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.5, 0.5, n), rng.uniform(-0.3, 0.3, n)


def test_free_motion_is_a_straight_line():
    tr = flow(Potential(2), None, ([1.0, -2.0], [0.5, 0.0]), T=1.0, h=0.01)
    assert np.allclose(tr.q[-1], [1.5, -2.0], atol=1e-12)
    assert np.allclose(tr.p, [[1.0, -2.0]])


def test_single_exponential_energy():
    V = Potential(1, {(1,): 1})
    assert energy_drift(V, None, ([0.7], [0.0]), 10.0, 1e-3) < 1e-8


def test_fourth_order_convergence():
    V = Potential(2, {(1, 0): 1, (-1, 1): 1, (0, -1): 1})
    s0 = ([1.5, -1.0], [0.2, 0.4])
    coarse = energy_drift(V, None, s0, 5.0, 0.1)
    fine = energy_drift(V, None, s0, 5.0, 0.05)
    assert coarse > 1e-10
    assert coarse / fine >= 8


def test_constant_function_has_zero_drift():
    tr = flow(catalog.POTENTIALS["H1"], None, moderate_state(2, 1), T=1.0)
    assert conservation_report([from_sympy("3", 2)], tr) == [0.0]


@pytest.mark.parametrize("cid", catalog.catalog_ids())
def test_catalog_integrals_conserved(cid):
    e = catalog.entry(cid)
    tr = flow(e.potential, PARAMS, moderate_state(e.potential.n, 7), T=10.0, h=1e-3, sample_every=10)
    assert max(conservation_report(e, tr, PARAMS)) < 1e-6


def test_sign_flipped_integral_drifts():
    e = catalog.entry("H6")
    bad = flip_term_sign(e.integrals[1])
    assert bad != e.integrals[1]
    tr = flow(e.potential, None, moderate_state(3, 7), T=10.0, h=1e-3, sample_every=10)
    good, flipped = conservation_report([e.integrals[1], bad], tr)
    assert good < 1e-6 and flipped > 1e-2


def test_flow_errors():
    V = Potential(1, {(1,): -1})  # unbounded below, escapes in finite time
    with pytest.raises(FlowError) as err:
        flow(V, None, ([5.0], [0.0]), T=10.0, h=0.01)
    assert 0 < err.value.time < 10
    with pytest.raises(ValueError):
        flow(V, None, ([0.0, 0.0], [0.0]), T=1.0)
    with pytest.raises(ValueError):
        flow(V, None, ([0.0], [0.0]), T=1.0, h=0.0)


def test_trajectory_records():
    tr = flow(Potential(1, {(1,): 1}), None, ([0.1], [0.0]), T=0.1, h=0.01, sample_every=5)
    assert len(tr) == 3
    recs = [json.loads(r) for r in tr.records()]
    assert [r["t"] for r in recs] == pytest.approx([0.0, 0.05, 0.1])
    assert set(recs[0]) == {"t", "p", "q"} and len(recs[0]["p"]) == 1


@pytest.mark.parametrize("case", parametrization_cases())
def test_parametrization_residuals(case):
    rep = verify_parametrization(case, trials=20, seed=0)
    assert len(rep.samples) == 20
    assert rep.samples[0].t == 0.0 or rep.resampled
    assert rep.max_level_residual < 1e-9
    assert rep.max_hamilton_residual < 1e-6
    assert rep.passed()


def test_parametrization_without_phases():
    assert verify_parametrization("H2", trials=5, seed=3, phases=False).passed()


def test_parametrization_levels_match_integrals():
    tp = TorusParametrization.load("H2")
    S = tp.state(0.7, 1.3, 0.4)
    H, I = tp.integral_values(S)
    lh, li = tp.levels(0.7, 1.3)
    assert abs(H - lh) < 1e-9 * abs(lh) and abs(I - li) < 1e-9 * abs(li)
