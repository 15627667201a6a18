import itertools
import random
from fractions import Fraction

import pytest

from conftest import rand_valuation
from mechkit.allocation import finite_set, make_standard
from mechkit.convexfn import is_in_B_gamma
from mechkit.errors import CapExceededError, SchemaError
from mechkit.mechanism import (
    Mechanism,
    bundle_price_menu,
    mechanism,
    revenue,
    verify_ic,
    verify_ir,
    verify_npt,
)
from mechkit.solver import (
    brev,
    discrete_valuation,
    myerson_price,
    solve_deterministic,
    solve_monotone,
    solve_rev,
    srev,
)


@pytest.fixture
def u12(exact):
    return discrete_valuation([(1,), (2,)], [Fraction(1, 2), Fraction(1, 2)])


@pytest.fixture
def iid12(exact):
    return discrete_valuation(
        [(1, 1), (1, 2), (2, 1), (2, 2)], [Fraction(1, 4)] * 4
    )


def test_discrete_valuation_validation(exact):
    with pytest.raises(SchemaError):
        discrete_valuation([], [])
    with pytest.raises(SchemaError):
        discrete_valuation([(1,)], [Fraction(1, 2)])  # mass missing
    with pytest.raises(SchemaError):
        discrete_valuation([(1,), (1,)], [Fraction(1, 2)] * 2)  # duplicate
    with pytest.raises(SchemaError):
        discrete_valuation([(-1,)], [Fraction(1)])
    X = discrete_valuation([(1, 2)], [1])
    assert X.expectation == (1, 2)


def test_marginal_and_bundle_aggregation(exact):
    X = discrete_valuation(
        [(1, 2), (2, 1), (1, 1)], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    )
    m0 = X.marginal(0)
    assert m0.support == ((1,), (2,)) and m0.probs == (Fraction(3, 4), Fraction(1, 4))
    b = X.bundle_total()
    assert b.support == ((2,), (3,)) and b.probs == (Fraction(1, 2), Fraction(1, 2))


def test_myerson_price_examples(exact, u12):
    assert myerson_price(u12) == (1, 1)  # both prices tie; smallest wins
    u123 = discrete_valuation([(1,), (2,), (3,)], [Fraction(1, 3)] * 3)
    assert myerson_price(u123) == (2, Fraction(4, 3))
    assert myerson_price(discrete_valuation([(5,)], [1])) == (5, 5)


def test_srev_brev_iid(exact, iid12, u12):
    assert srev(iid12) == 2
    assert brev(iid12) == Fraction(9, 4)  # bundle price 3 sells w.p. 3/4
    assert srev(u12) == brev(u12) == 1  # single good: everything collapses


def test_solve_rev_point_mass_full_surplus(exact):
    X = discrete_valuation([(3, 4)], [1])
    res = solve_rev(make_standard("cube", 2), X)
    assert res.optimal_revenue == 7
    assert res.certified
    assert ((Fraction(1), Fraction(1)), Fraction(7)) in res.mechanism.menu.items


def test_solve_rev_single_good(exact, u12):
    # lotteries cannot beat the best deterministic price here
    res = solve_rev(make_standard("cube", 1), u12)
    assert res.optimal_revenue == 1 and res.certified
    for price in (1, 2):  # price enumeration oracle
        m = mechanism([((0,), 0), ((1,), price)], make_standard("cube", 1))
        assert revenue(m, u12) <= res.optimal_revenue


def grid_menu_search(gamma, X, resolution=8, items=3):
    """Exhaustive search over small menus on a coarse allocation/payment
    lattice; a solver-independent lower-bound oracle."""
    k = gamma.dim
    best = Fraction(0)
    allocs = [
        tuple(Fraction(a, resolution) for a in combo)
        for combo in itertools.product(range(resolution + 1), repeat=k)
    ]
    # payments only matter on a lattice of the support values
    rng = random.Random(0)
    pays = [Fraction(n, 4) for n in range(0, 17)]
    for _ in range(4000):
        its = [(tuple(Fraction(0) for _ in range(k)), Fraction(0))]
        for _ in range(items):
            its.append((rng.choice(allocs), rng.choice(pays)))
        m = mechanism(its, gamma, validate=False)
        r = revenue(m, X)
        if r > best:
            best = r
    return best


def test_solve_rev_iid_uniform12(exact, iid12):
    res = solve_rev(make_standard("cube", 2), iid12)
    # bundling at price 3 gives 9/4; separate prices give 2; the program is
    # certified optimal by its exact dual, and a randomized menu search
    # cannot do better
    assert res.optimal_revenue == Fraction(9, 4)
    assert res.optimal_revenue >= brev(iid12) >= 2
    assert res.certified
    assert res.diagnostics["dual_certificate_gap"] == 0
    assert grid_menu_search(make_standard("cube", 2), iid12) <= res.optimal_revenue


def test_solve_rev_requires_polytope(exact, u12):
    with pytest.raises(ValueError):
        solve_rev(make_standard("cube_vertices", 1), u12)


def test_solve_deterministic_single_good(exact, u12):
    res = solve_deterministic(make_standard("cube_vertices", 1), u12)
    assert res.optimal_revenue == 1 and res.certified
    # brute force over the four allocation assignments agrees
    assert res.diagnostics["assignments_enumerated"] == 4


def test_solve_deterministic_two_goods(exact, iid12):
    res = solve_deterministic(make_standard("cube_vertices", 2), iid12)
    assert res.certified
    assert res.optimal_revenue >= Fraction(9, 4)  # bundle price 3 is feasible
    mb = Mechanism(bundle_price_menu(make_standard("cube_vertices", 2), 3))
    assert revenue(mb, iid12) == Fraction(9, 4)
    # frozen value: bundling is optimal among deterministic menus here
    assert res.optimal_revenue == Fraction(9, 4)


def test_solve_deterministic_null_set(exact, u12):
    res = solve_deterministic(finite_set([(0,)]), u12)
    assert res.optimal_revenue == 0


def test_solve_deterministic_cap(exact):
    X = rand_valuation(random.Random(1), 6, 2)
    with pytest.raises(CapExceededError):
        solve_deterministic(make_standard("cube_vertices", 2), X, cap=10)


def test_deterministic_below_lp(exact, iid12):
    rev = solve_rev(make_standard("cube", 2), iid12).optimal_revenue
    det = solve_deterministic(make_standard("cube_vertices", 2), iid12).optimal_revenue
    assert det <= rev


def test_solve_monotone_single_good(exact, u12):
    res = solve_monotone(make_standard("cube", 1), u12, "payment")
    assert res.optimal_revenue == 1 and res.certified
    assert res.class_label == "MONREV_UB"


def test_solve_monotone_point_mass(exact):
    X = discrete_valuation([(3, 4)], [1])
    res = solve_monotone(make_standard("cube", 2), X, "payment")
    assert res.optimal_revenue == 7 and res.certified


def test_solve_monotone_bounded_by_rev(exact, iid12):
    cube2 = make_standard("cube", 2)
    rev = solve_rev(cube2, iid12).optimal_revenue
    for mode in ("payment", "allocation"):
        res = solve_monotone(cube2, iid12, mode)
        assert res.optimal_revenue <= rev
        label = "MONREV_UB" if mode == "payment" else "AMONREV_UB"
        assert res.class_label == label


def test_witness_round_trip_and_verification(exact):
    rng = random.Random(14)
    cube2 = make_standard("cube", 2)
    for _ in range(8):
        X = rand_valuation(rng, rng.randint(1, 5), 2)
        res = solve_rev(cube2, X)
        wit = res.mechanism
        assert revenue(wit, X) == res.optimal_revenue
        assert verify_ic(wit, X.support).passed
        assert verify_ir(wit, X.support).passed
        assert verify_npt(wit).passed
        probes = list(X.support) + [(0, 0), (5, 5)]
        assert is_in_B_gamma(wit.payoff_function(), cube2, probes).passed


def test_scale_covariance(exact):
    rng = random.Random(8)
    cube2 = make_standard("cube", 2)
    for _ in range(5):
        X = rand_valuation(rng, 4, 2)
        lam = Fraction(rng.randint(1, 8), 2)
        base = solve_rev(cube2, X).optimal_revenue
        scaled = solve_rev(cube2, X.scaled(lam)).optimal_revenue
        assert scaled == lam * base


def test_zero_probability_point_is_inert(exact):
    rng = random.Random(9)
    cube2 = make_standard("cube", 2)
    for _ in range(5):
        X = rand_valuation(rng, 4, 2)
        extra = (Fraction(9, 2), Fraction(7, 2))
        assert extra not in X.support
        X2 = discrete_valuation(
            list(X.support) + [extra], list(X.probs) + [Fraction(0)]
        )
        assert solve_rev(cube2, X2).optimal_revenue == solve_rev(cube2, X).optimal_revenue


def test_revenue_upper_bound_by_norm(exact):
    # expected payment never exceeds the norm bound times the expected
    # Euclidean norm of the valuation (checked in floats; both sides are
    # irrational in general)
    from mechkit.allocation import gamma_norm
    from mechkit.numeric import norm_sq

    rng = random.Random(10)
    cube2 = make_standard("cube", 2)
    for _ in range(5):
        X = rand_valuation(rng, 4, 2)
        res = solve_rev(cube2, X)
        e_norm = sum(
            float(p) * float(norm_sq(x)) ** 0.5 for x, p in zip(X.support, X.probs)
        )
        assert float(res.optimal_revenue) <= gamma_norm(cube2) * e_norm + 1e-9


def test_simplex_eq_forces_zero_revenue(exact):
    # when every menu item must allocate a full unit, the origin type can
    # imitate anyone, so nothing can be charged
    X = discrete_valuation([(1, 1)], [1])
    res = solve_rev(make_standard("simplex_eq", 2), X)
    assert res.optimal_revenue == 0


def test_deterministic_monotone_modes(exact, iid12):
    cv2 = make_standard("cube_vertices", 2)
    base = solve_deterministic(cv2, iid12).optimal_revenue
    for mode in ("payment", "allocation"):
        res = solve_monotone(cv2, iid12, mode)
        assert res.optimal_revenue <= base


def test_deterministic_without_null_allocation(exact):
    # sets that must always allocate: the origin type can imitate anyone, so
    # only the value difference between options is extractable
    sv2 = make_standard("simplex_vertices", 2)
    res = solve_deterministic(sv2, discrete_valuation([(2, 1)], [1]))
    assert res.optimal_revenue == 1 and res.certified
    res = solve_deterministic(sv2, discrete_valuation([(1, 1)], [1]))
    assert res.optimal_revenue == 0


def test_float_mode_lp(floaty):
    cube2 = make_standard("cube", 2)
    X = discrete_valuation(
        [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)], [0.25] * 4
    )
    res = solve_rev(cube2, X)
    assert abs(res.optimal_revenue - 2.25) < 1e-9
    assert res.certified


def test_vertex_only_polytope_agrees_with_halfspace_form(exact):
    # the program runs on hull weights when only vertices are known; both
    # representations of the cube must land on the same optimum
    from mechkit.allocation import polytope

    rng = random.Random(123)
    corners = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for _ in range(6):
        X = rand_valuation(rng, rng.randint(1, 5), 2)
        h_path = solve_rev(make_standard("cube", 2), X)
        v_only = polytope(vertices=corners)
        assert v_only.halfspaces is None
        v_path = solve_rev(v_only, X)
        assert v_path.optimal_revenue == h_path.optimal_revenue
        assert v_path.certified


def test_lexicographic_tie_break_is_deterministic(exact):
    rng = random.Random(99)
    cube2 = make_standard("cube", 2)
    for _ in range(5):
        X = rand_valuation(rng, 4, 2)
        a = solve_rev(cube2, X)
        b = solve_rev(cube2, X)
        assert a.mechanism.menu.items == b.mechanism.menu.items
        # dropping the refinement must not change the optimal value
        c = solve_rev(cube2, X, lex_refine=False)
        assert c.optimal_revenue == a.optimal_revenue


def test_revenue_invariant_under_dominated_item_pruning(exact):
    import random as _random

    from mechkit.convexfn import prune_dominated

    rng = _random.Random(55)
    cube2 = make_standard("cube", 2)
    for _ in range(10):
        X = rand_valuation(rng, 4, 2)
        res = solve_rev(cube2, X)
        pruned = prune_dominated(res.mechanism.payoff_function(), (0, 0), (8, 8))
        m2 = mechanism([(g, -c) for g, c in pruned.pieces], cube2, validate=False)
        assert revenue(m2, X) == res.optimal_revenue
