from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from torusint.catalog import COR2_DIM3

from torusint.tessellation import (
    ArcMultiset,
    TriangleMultiset,
    circle_coverings,
    complete_partial_covering,
    enumerate_admissible_triangles,
    enumerate_sphere_candidates,
    find_gluing,
    gluing_filter,
    maximal_tessellations,
    realize_summit_sets,
    spherical_excess,
    tessellation_directions,
)

h = Fraction


def arcs(*xs):
    return ArcMultiset(tuple(h(x) for x in xs))


def test_circle_coverings_exact():
    got = {str(c) for c in circle_coverings()}
    assert got == {
        "{pi, pi}",
        "{pi, pi/2, pi/2}",
        "{5pi/6, 2pi/3, pi/2}",
        "{3pi/4, 3pi/4, pi/2}",
        "{2pi/3, 2pi/3, 2pi/3}",
        "{pi/2, pi/2, pi/2, pi/2}",
    }
    assert all(c.total == 2 for c in circle_coverings())


def test_complete_partial_covering():
    assert [str(c) for c in complete_partial_covering(arcs("3/4"))] == ["{3pi/4, 3pi/4, pi/2}"]
    assert [str(c) for c in complete_partial_covering(arcs("5/6"))] == ["{5pi/6, 2pi/3, pi/2}"]
    assert len(complete_partial_covering(arcs())) == 6
    for x in ["1/2", "2/3", "3/4", "5/6"]:
        assert complete_partial_covering(arcs(x))
    with pytest.raises(ValueError):
        complete_partial_covering(arcs("1"))


def test_admissible_triangles_and_areas():
    tris = enumerate_admissible_triangles()
    assert [t.area for t in tris] == [h(1, 2), h(2, 3), h(3, 4), h(5, 6), h(1), h(5, 4)]
    assert (h(2, 3),) * 3 not in [t.edges for t in tris]
    mpmath.mp.dps = 50
    for t in tris:
        exact = mpmath.mpf(t.area.numerator) / t.area.denominator * mpmath.pi
        assert abs(spherical_excess(t.edges) - exact) < mpmath.mpf(10) ** -40


def test_sphere_candidates():
    got = {str(c) for c in enumerate_sphere_candidates()}
    assert len(got) == 9
    assert "[P5,P5,P5,P5]" in got and "[P1,P1,P1,P1,P5,P5]" in got
    for c in enumerate_sphere_candidates():
        assert c.area == 4
        assert all(n % 2 == 0 for n in c.edge_counts().values())


def test_candidates_are_multisets():
    assert TriangleMultiset.parse("[P5,P1,P6,P6]") == TriangleMultiset.parse("[P1,P5,P6,P6]")
    assert enumerate_sphere_candidates() == enumerate_sphere_candidates()


def test_gluing_filter_removes_exactly_two():
    cands = enumerate_sphere_candidates()
    kept = gluing_filter(cands)
    removed = {str(c) for c in cands} - {str(c) for c in kept}
    assert removed == {"[P1,P1,P1,P1,P5,P5]", "[P1,P1,P1,P3,P3,P5]"}
    assert len(kept) == 7
    assert "[P3,P3,P6,P6]" in {str(c) for c in kept}


@pytest.mark.parametrize("ms", [str(m) for m in maximal_tessellations()])
def test_gluing_certificates(ms):
    cert = find_gluing(TriangleMultiset.parse(ms))
    assert cert.check()
    assert cert.euler == 2
    assert all(abs(s - 2) < 1e-9 for s in cert.angle_sums)
    dirs, edges = tessellation_directions(cert)
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1)
    for u, v, L in edges:
        assert abs(np.arccos(np.clip(dirs[u] @ dirs[v], -1, 1)) - float(L) * np.pi) < 1e-8


def test_realize_two_thirds_family():
    (s,) = realize_summit_sets(arcs("2/3", "2/3", "2/3"))
    a = s.free[0]
    expected = [(a, 0), (-a / 2, sympy.sqrt(3) * a / 2), (-a / 2, -sympy.sqrt(3) * a / 2)]
    assert len(s.free) == 1
    assert all(sympy.simplify(sympy.Matrix(v) - sympy.Matrix(w)) == sympy.zeros(2, 1) for v, w in zip(s.vectors, expected))


def test_realize_pi_pi():
    (s,) = realize_summit_sets(arcs(1, 1))
    a, b = s.free
    assert s.vectors == [(a, 0), (-b, 0)]


def test_realize_oblique_norm_branches():
    assert len(realize_summit_sets(arcs("5/6", "2/3", "1/2"))) == 2
    for s in realize_summit_sets(arcs("3/4", "3/4", "1/2")):
        n = s.norms2()
        ratios = {sympy.simplify(n[i] / n[j]) for i, j, L in s.edges if L == h(3, 4)}
        assert ratios <= {2, sympy.Rational(1, 2)}


def _cosines(X):
    G = X @ X.T
    return np.sort(G[~np.eye(len(X), dtype=bool)] / G[0, 0])


def test_p5_tetrahedron_matches_c3a():
    # two right-angle edges and four of length 2pi/3, all summits of equal norm
    (s,) = realize_summit_sets(TriangleMultiset.parse("[P5,P5,P5,P5]"))
    X = s.numeric()
    assert np.allclose(np.linalg.norm(X, axis=1), np.linalg.norm(X[0]))
    C = np.array([[float(x) for x in k] for k in COR2_DIM3["C3a"].support()])
    assert np.allclose(_cosines(X), _cosines(C))
    assert np.allclose(_cosines(X), [-0.5] * 8 + [0.0] * 4)


def test_realize_rejects_non_gluing():
    with pytest.raises(ValueError):
        realize_summit_sets(TriangleMultiset.parse("[P1,P1,P1,P1,P5,P5]"))
