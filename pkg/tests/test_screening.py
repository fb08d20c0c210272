import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusint.catalog import COR2_DIM2, COR2_DIM3, EQ1, POTENTIALS, SEPARABLE, SQRT3, screening_fixtures
from torusint.potential import Potential, apply_isometry, is_real_potential, separability_witness
from torusint.quadext import Frequency, QuadExt
from torusint.screening import (
    AngleClass,
    ScreeningError,
    Verdict,
    classify_angle,
    enumerate_two_term_pairs,
    eqtre_member,
    recheck_witness,
    screen,
)


def test_classify_examples():
    assert classify_angle([2, 0], [-1, SQRT3]) is AngleClass.TWO_THIRDS
    assert classify_angle([6, 0], [-3, -SQRT3]) is AngleClass.FIVE_SIXTHS
    assert classify_angle([1, 0], [2, 0]) is AngleClass.ZERO
    assert classify_angle([1, 0], [-1, 1]) is AngleClass.THREE_QUARTERS
    assert classify_angle([1, 0], [-3, 0]) is AngleClass.STRAIGHT
    assert classify_angle([1, 0], [1, 1]) is AngleClass.OTHER
    with pytest.raises(ValueError):
        classify_angle([0, 0], [1, 0])


vec = st.tuples(st.integers(-4, 4), st.integers(-4, 4)).filter(any)
pos = st.sampled_from([QuadExt(1), QuadExt(2), QuadExt(Fraction(1, 3)), QuadExt(0, 1, 3), QuadExt(1, 1, 3)])


@given(vec, vec, pos, pos)
def test_classify_symmetric_and_scale_invariant(v, w, a, b):
    c = classify_angle(v, w)
    assert classify_angle(w, v) is c
    assert classify_angle(Frequency(v).scaled(a), Frequency(w).scaled(b)) is c


@pytest.mark.parametrize("name", sorted(screening_fixtures()))
def test_catalog_fixtures_pass(name):
    rep = screen(screening_fixtures()[name])
    assert rep.overall, rep.failed()


@pytest.mark.parametrize("name", sorted(POTENTIALS))
def test_real_form_catalog_passes(name):
    assert screen(POTENTIALS[name]).overall


def test_eq1_fails_exactly_condition_4():
    rep = screen(EQ1)
    assert rep.failed() == [4]
    assert rep.witnesses[4]
    for w in rep.witnesses[4]:
        assert recheck_witness(EQ1, w)


def test_separable_trivially_passes():
    rep = screen(Potential(2, {(1, 0): 1, (-1, 0): 1, (0, 1): 1}))
    assert rep.overall
    assert rep.verdicts[3] is Verdict.NOT_APPLICABLE


def test_failures_carry_reproducible_witnesses():
    bad = [
        Potential(2, {(1, 0): 1, (1, 1): 1}),  # angle pi/4
        Potential(2, {(3, 0): 1, (-1, 1): 1, (0, -1): 1}),  # norm ratio 9/2 at 3pi/4
        Potential(2, {(1, 0): 1, (0, 1): 1, (1, 1): 1, (-1, -1): 1, (3, 1): 1}),
        Potential(2, {(2, 0): 1, (-1, SQRT3): 1, (-1, -SQRT3): 1, (1, 0): 1}),
    ]
    for V in bad:
        rep = screen(V)
        assert not rep.overall
        for c in rep.failed():
            assert rep.witnesses[c]
            assert all(recheck_witness(V, w) for w in rep.witnesses[c])


def test_screen_errors():
    with pytest.raises(ScreeningError):
        screen(Potential(4, {(1, 0, 0, 0): 1}))
    with pytest.raises(ScreeningError):
        screen(Potential(2))


ROTATIONS = [
    [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]],
    [[0, 1], [1, 0]],
    [[QuadExt(Fraction(1, 2)), QuadExt(0, Fraction(-1, 2), 3)], [QuadExt(0, Fraction(1, 2), 3), QuadExt(Fraction(1, 2))]],
]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ROTATIONS), st.sampled_from([1, 3, Fraction(1, 2)]), st.sampled_from(["C2a", "C2b", "C2c", "S2", "S2b"]))
def test_screen_invariant_under_isometry(M, c, name):
    V = {**COR2_DIM2, **SEPARABLE}[name]
    try:
        W = apply_isometry(V, M, c)
    except ValueError:
        return  # rotation by pi/3 mixes radicands with a sqrt(3) support
    a, b = screen(V), screen(W)
    assert a.verdicts == b.verdicts
    assert {k: len(v) for k, v in a.witnesses.items()} == {k: len(v) for k, v in b.witnesses.items()}


def test_screen_invariant_on_eq1_mirror():
    W = apply_isometry(EQ1, [[1, 0], [0, -1]], 2)
    assert screen(W).failed() == [4]


@pytest.mark.parametrize("seed", range(25))
def test_real_and_passing_implies_separable(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 3])
    terms = {}
    for _ in range(rng.randint(1, 3)):
        k = tuple(rng.randint(-2, 2) for _ in range(n))
        if any(k):
            c = rng.randint(1, 3)
            terms[k] = c
            terms[tuple(-x for x in k)] = c
    if not terms:
        return
    V = Potential(n, terms)
    assert is_real_potential(V)
    if screen(V).overall:
        assert separability_witness(V) is not None


# -- two-term edges ------------------------------------------------------------


def test_eqtre_examples():
    assert eqtre_member(3, -2) == 1
    assert eqtre_member(1, 1) is None
    assert eqtre_member(QuadExt(0, 1, 3), QuadExt(0, -1, 3)) == 1
    assert eqtre_member(2, Fraction(-1, 2)) == 0


@pytest.mark.parametrize("seed", range(100))
def test_eqtre_matches_direct_rational_evaluation(seed):
    rng = random.Random(seed)
    k = Fraction(rng.randint(-12, 12), rng.randint(1, 4))
    s = Fraction(rng.randint(-12, 12), rng.randint(1, 4))
    if seed % 4 == 0:
        # force a hit: s = -(n(k^2+1)/2 + 1)/k
        n = rng.randint(0, 4)
        k = k or Fraction(1)
        s = -(Fraction(n) * (k * k + 1) / 2 + 1) / k
    value = (k * s + 1) / (k * k + 1)
    expected = int(-2 * value) if (-2 * value).denominator == 1 and value <= 0 else None
    assert eqtre_member(k, s) == expected


def test_two_term_pairs():
    pairs = enumerate_two_term_pairs()
    assert pairs[0].parametric and pairs[0].angle is AngleClass.QUARTER
    found = {(p.k, p.s): p for p in pairs[1:]}
    r3 = QuadExt(0, 1, 3)
    expected = {
        (r3, -r3): AngleClass.TWO_THIRDS,
        (QuadExt(3), QuadExt(-2)): AngleClass.THREE_QUARTERS,
        (QuadExt(0, 3, 3), QuadExt(0, Fraction(-5, 3), 3)): AngleClass.FIVE_SIXTHS,
    }
    assert set(found) == set(expected)
    for key, angle in expected.items():
        assert found[key].angle is angle
        assert found[key].n * found[key].m < 4


def test_two_term_pairs_stable_in_scan_bound():
    assert [str(p) for p in enumerate_two_term_pairs(3)] == [str(p) for p in enumerate_two_term_pairs(6)]
