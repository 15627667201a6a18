import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mechkit.allocation import (
    contains,
    finite_set,
    gamma_norm,
    hull_distance_l1,
    make_standard,
    polytope,
    support_max,
)
from mechkit.numeric import dot, numeric_mode, vec


def test_make_standard_cube(exact):
    g = make_standard("cube", 2)
    assert set(g.vertices) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert g.gamma_sq == 2  # norm sqrt(2)


def test_make_standard_unit_demand_det(exact):
    g = make_standard("unit_demand_det", 2)
    assert set(g.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert g.gamma_sq == 1


def test_make_standard_simplex_vertices_k1(exact):
    g = make_standard("simplex_vertices", 1)
    assert g.vertices == ((1,),)
    assert g.gamma_sq == 1


def test_make_standard_rejects_bad_input(exact):
    with pytest.raises(ValueError):
        make_standard("octahedron", 2)
    with pytest.raises(ValueError):
        make_standard("cube", 0)


def test_gamma_norm_examples(exact):
    assert make_standard("cube", 3).gamma_sq == 3
    assert make_standard("unit_demand", 5).gamma_sq == 1
    assert finite_set([(2, 0), (0, 3)]).gamma_sq == 9
    assert abs(gamma_norm(make_standard("cube", 3)) - 3**0.5) < 1e-12


def test_support_max_examples(exact):
    v, w = support_max(make_standard("cube", 2), (3, -1))
    assert v == 3 and w == (1, 0)
    v, w = support_max(make_standard("unit_demand_det", 2), (-1, -2))
    assert v == 0 and w == (0, 0)
    v, w = support_max(make_standard("simplex_eq", 3), (1, 1, 1))
    assert v == 1 and w == (1, 0, 0)  # all vertices tie; lexicographic pick


def test_contains_examples(exact):
    assert contains(make_standard("cube", 2), (Fraction(1, 2), 1), tol=0)
    assert not contains(
        make_standard("cube_vertices", 2), (Fraction(1, 2), Fraction(1, 2)), tol=0
    )
    assert not contains(
        make_standard("unit_demand", 2), (Fraction(3, 5), Fraction(3, 5)), tol=0
    )


def test_vertex_enumeration_from_halfspaces(exact):
    p = polytope(halfspaces=[((1, 1), 1)], dim=2)
    assert set(p.vertices) == {(0, 0), (1, 0), (0, 1)}
    with pytest.raises(ValueError):
        polytope(halfspaces=[((1, 0), -1)], dim=2)  # empty
    with pytest.raises(ValueError):
        polytope(halfspaces=[((1, 0), 1)], dim=5)  # k > 4, no vertices given


def test_vertices_must_satisfy_given_halfspaces(exact):
    with pytest.raises(ValueError):
        polytope(vertices=[(2, 0)], halfspaces=[((1, 0), 1)])


def test_negative_coordinates_rejected(exact):
    with pytest.raises(ValueError):
        finite_set([(-1, 0)])


def test_support_function_convex_and_homogeneous(exact):
    rng = random.Random(5)
    sets = [
        make_standard("cube", 2),
        make_standard("unit_demand", 3),
        finite_set([(2, 0), (0, 3), (1, 1)]),
    ]
    for g in sets:
        k = g.dim
        for _ in range(40):
            y1 = tuple(Fraction(rng.randint(-8, 8), 4) for _ in range(k))
            y2 = tuple(Fraction(rng.randint(-8, 8), 4) for _ in range(k))
            lam = Fraction(rng.randint(0, 8), 8)
            mix = tuple(lam * a + (1 - lam) * b for a, b in zip(y1, y2))
            v1, w1 = support_max(g, y1)
            v2, _ = support_max(g, y2)
            vm, _ = support_max(g, mix)
            assert vm <= lam * v1 + (1 - lam) * v2  # convexity
            c = Fraction(rng.randint(0, 12), 4)
            vs, _ = support_max(g, tuple(c * a for a in y1))
            assert vs == c * v1  # positive homogeneity
            assert contains(g, w1)  # witness membership
            # norm bound along unit-ish directions
            assert v1 * v1 <= g.gamma_sq * dot(y1, y1)


def test_hull_membership_brute_force_triangles(exact):
    # polytope with both representations: random feasible points must lie in
    # the hull of the vertices; brute force via triangle decomposition in 2-D
    rng = random.Random(11)
    g = make_standard("unit_demand", 2)

    def in_some_triangle(p):
        for a, b, c in itertools.combinations(g.vertices, 3):
            d = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
            if d == 0:
                continue
            l1 = ((b[0] - p[0]) * (c[1] - p[1]) - (c[0] - p[0]) * (b[1] - p[1])) / d
            l2 = ((c[0] - p[0]) * (a[1] - p[1]) - (a[0] - p[0]) * (c[1] - p[1])) / d
            l3 = 1 - l1 - l2
            if l1 >= 0 and l2 >= 0 and l3 >= 0:
                return True
        return False

    found = 0
    for _ in range(200):
        p = (Fraction(rng.randint(0, 8), 8), Fraction(rng.randint(0, 8), 8))
        feasible = all(dot(n, p) <= b for n, b in g.halfspaces)
        if feasible:
            assert in_some_triangle(p)
            assert contains(g, p, tol=0)
            found += 1
        else:
            assert not contains(g, p, tol=0)
    assert found > 20


def test_hull_distance_l1(exact):
    verts = [(0, 0), (1, 0), (0, 1)]
    assert hull_distance_l1([vec(v) for v in verts], vec((Fraction(1, 2), Fraction(1, 4)))) == 0
    assert hull_distance_l1([vec(v) for v in verts], vec((1, 1))) == 1


def test_contains_vertex_only_polytope(exact):
    p = polytope(vertices=[(0, 0), (2, 0), (0, 2)])
    assert contains(p, (1, Fraction(1, 2)), tol=0)
    assert not contains(p, (2, 2), tol=0)


@settings(max_examples=60, deadline=None)
@given(
    y=st.tuples(
        st.integers(min_value=-12, max_value=12),
        st.integers(min_value=-12, max_value=12),
    )
)
def test_support_witness_attains_value_everywhere(y):
    with numeric_mode("exact"):
        g = make_standard("cube", 2)
        v, w = support_max(g, y)
        assert v == dot(w, vec(y))
        for other in g.vertices:
            assert dot(other, vec(y)) <= v


def test_float_mode_contains_tolerance(floaty):
    g = make_standard("cube", 2)
    assert contains(g, (0.5, 1.0 + 5e-10))
    assert not contains(g, (0.5, 1.1))


def test_valuation_constructor(exact):
    from mechkit.allocation import valuation

    assert valuation((1, Fraction(1, 2))) == (1, Fraction(1, 2))
    with pytest.raises(ValueError):
        valuation((1, 2, 3), dim=2)
    with pytest.raises(ValueError):
        with numeric_mode("float"):
            valuation((float("inf"),))
