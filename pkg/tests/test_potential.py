import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusint.catalog import COR2_DIM2, COR2_DIM3, EQ1, POTENTIALS, SEPARABLE, SQRT3
from torusint.potential import (
    Potential,
    PotentialError,
    apply_isometry,
    convex_hull,
    inside_or_on,
    is_real_potential,
    limit_potential,
    separability_witness,
    support,
)
from torusint.quadext import Frequency, QuadExt
from torusint.screening import classify_angle

F = Frequency


def test_support_examples():
    assert support(Potential(2, {(2, 0): 1})) == {F([2, 0])}
    assert support(POTENTIALS["H1"]) == {F([2, 0]), F([-1, SQRT3]), F([-1, -SQRT3])}
    assert support(Potential(2)) == set()


def test_zero_frequency_rejected():
    with pytest.raises(PotentialError):
        Potential(2, {(0, 0): 1})


def test_hull_eq1():
    # (2,0) is a vertex: it is not on the segment from (6,0) to (-3,-sqrt3)
    rep = convex_hull(EQ1)
    assert set(rep.summits) == {F([6, 0]), F([2, 0]), F([-3, -SQRT3])}
    assert not rep.contains_origin


def test_hull_h1_and_single_point():
    rep = convex_hull(POTENTIALS["H1"])
    assert len(rep.summits) == 3 and rep.contains_origin
    rep = convex_hull(Potential(2, {(1, 2): 1}))
    assert rep.summits == (F([1, 2]),) and not rep.contains_origin


def test_hull_collinear_points_are_not_summits():
    V = Potential(2, {(1, 0): 1, (2, 0): 1, (3, 0): 1, (0, 1): 1})
    assert set(convex_hull(V).summits) == {F([1, 0]), F([3, 0]), F([0, 1])}


def test_hull_dim2_counterclockwise():
    rep = convex_hull(COR2_DIM2["C2c"])
    pts = rep.summits
    for a, b, c in zip(pts, pts[1:] + pts[:1], pts[2:] + pts[:2]):
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        assert cross.sign() > 0


@pytest.mark.parametrize("name", sorted(COR2_DIM3))
def test_hull_dim3_faces_and_euler(name):
    rep = convex_hull(COR2_DIM3[name])
    V, E, Fc = len(rep.summits), len(rep.edges), len(rep.faces)
    assert rep.affine_dimension == 3 and rep.contains_origin
    assert V - E + Fc == 2


@pytest.mark.parametrize("V", list(POTENTIALS.values()) + [EQ1] + list(SEPARABLE.values()))
def test_hull_invariants(V):
    rep = convex_hull(V)
    assert set(rep.summits) <= V.support()
    assert all(inside_or_on(rep, k) for k in V.support())


def test_limit_examples():
    V = Potential(2, {(2, 0): 1, (0, 2): 1, (-2, -2): 1, (-1, -1): "alpha"}, params=("alpha",))
    assert limit_potential(V, [1, 0]).support() == {F([2, 0])}
    assert limit_potential(V, [1, 1]).support() == {F([2, 0]), F([0, 2])}
    single = Potential(2, {(3, 1): 2})
    assert limit_potential(single, [-1, 5]) == single
    with pytest.raises(PotentialError):
        limit_potential(V, [0, 0])


directions = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-1, 1)).filter(lambda v: any(v))


@given(directions)
def test_limit_idempotent_and_sub_support(v):
    V = COR2_DIM3["C3c"]
    W = limit_potential(V, v)
    assert W.support() <= V.support()
    assert limit_potential(W, v) == W


def test_isometry_examples():
    V = POTENTIALS["H1"]
    assert apply_isometry(V, [[1, 0], [0, 1]]) == V
    R = apply_isometry(V, [[1, 0], [0, -1]])
    assert R.support() == V.support()
    assert apply_isometry(Potential(2, {(5, 0): 1}), [[0, -1], [1, 0]]).support() == {F([0, 5])}
    with pytest.raises(PotentialError):
        apply_isometry(V, [[1, 1], [0, 1]])
    with pytest.raises(PotentialError):
        apply_isometry(V, [[1, 0], [0, 1]], scale=-1)


def rational_rotations():
    """Orthogonal 2x2 matrices from Pythagorean triples, with reflections."""
    out = []
    for a, b, c in [(3, 4, 5), (5, 12, 13), (8, 15, 17), (1, 0, 1)]:
        x, y = Fraction(a, c), Fraction(b, c)
        out.append([[x, -y], [y, x]])
        out.append([[x, y], [y, -x]])
    return out


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(rational_rotations()), st.sampled_from([1, 2, Fraction(1, 3)]), st.sampled_from(sorted(COR2_DIM2)))
def test_isometry_preserves_geometry(M, scale, name):
    V = COR2_DIM2[name]
    W = apply_isometry(V, M, scale)
    hv, hw = convex_hull(V), convex_hull(W)
    assert len(hv.summits) == len(hw.summits) and len(hv.edges) == len(hw.edges)
    img = {k: F(QuadExt(scale) * sum((QuadExt(M[i][j]) * k[j] for j in range(2)), QuadExt(0)) for i in range(2)) for k in V.support()}
    for a, b in itertools.combinations(sorted(V.support(), key=F.sort_key), 2):
        assert classify_angle(a, b) == classify_angle(img[a], img[b])
        assert a.norm2() / b.norm2() == img[a].norm2() / img[b].norm2()


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(rational_rotations()))
def test_reality_invariant_under_rational_isometry(M):
    V = Potential(2, {(1, 0): 1, (-1, 0): 1, (0, 2): 3, (0, -2): 3})
    assert is_real_potential(V) == is_real_potential(apply_isometry(V, M))


def test_reality_examples():
    assert is_real_potential(Potential(1, {(1,): 1, (-1,): 1}))
    assert not is_real_potential(Potential(1, {(2,): 1}))
    assert not is_real_potential(Potential(1, {(1,): 2, (-1,): 3}))
    with pytest.raises(PotentialError):
        is_real_potential(Potential(1, {(1,): "a", (-1,): "a"}, params=("a",)))


def test_separability_examples():
    w = separability_witness(Potential(2, {(1, 0): 1, (0, 2): 1}))
    assert w.matrix == ((QuadExt(1), QuadExt(0)), (QuadExt(0), QuadExt(1)))
    assert separability_witness(POTENTIALS["H1"]) is None
    w = separability_witness(Potential(2, {(1, 1): 1, (-2, -2): 1, (1, -1): 1}))
    assert w is not None and w.representable
    r = QuadExt(0, Fraction(1, 2), 2)
    assert {tuple(row) for row in w.matrix} <= {(r, r), (r, -r), (-r, r), (-r, -r)}
    # rows map each support line onto an axis
    for k in [F([1, 1]), F([1, -1])]:
        image = [sum((row[j] * k[j] for j in range(2)), QuadExt(0)) for row in w.matrix]
        assert sum(1 for c in image if c) == 1


def test_separability_dim3():
    w = separability_witness(SEPARABLE["S3"])
    assert w is not None and w.representable
    assert separability_witness(COR2_DIM3["C3a"]) is None
