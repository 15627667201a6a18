import random
from fractions import Fraction

import pytest

from conftest import rand_chain_menu, rand_menu, rand_polytope, rand_valuation
from mechkit.allocation import make_standard
from mechkit.convexfn import dir_derivative, evaluate
from mechkit.mechanism import (
    Mechanism,
    TabularMechanism,
    bundle_price_menu,
    choose,
    choose_tie_favorable,
    default_verification_grid,
    fixed_price_menu,
    lattice_closure,
    mechanism,
    menu,
    normalize_npt,
    null_menu,
    payoff,
    revenue,
    verify_ic,
    verify_ir,
    verify_monotone_allocation,
    verify_monotone_payment,
    verify_npt,
)
from mechkit.solver import discrete_valuation


@pytest.fixture
def cube1(exact):
    return make_standard("cube", 1)


@pytest.fixture
def cube2(exact):
    return make_standard("cube", 2)


def test_payoff_examples(cube1, cube2):
    m = mechanism([((0,), 0), ((1,), 2)], cube1)
    assert payoff(m, (3,)) == 1
    assert payoff(Mechanism(null_menu(cube1)), (7,)) == 0
    m2 = mechanism([((0, 0), 0), ((1, 1), 2)], cube2)
    assert payoff(m2, (Fraction(3, 2), Fraction(3, 2))) == 1


def test_choose_breaks_ties_for_the_seller(cube1):
    m = mechanism([((0,), 0), ((1,), 2)], cube1)
    assert choose(m, (2,)) == ((1,), 2)  # tie at payoff 0 goes to the sale
    assert choose(m, (3,)) == ((1,), 2)
    assert choose(m, (1,)) == ((0,), 0)


def test_choose_payment_is_directional_derivative_gap(exact):
    # seller-favorable payment equals f'(x;x) - f(x) for the payoff function
    rng = random.Random(41)
    for _ in range(50):
        k = rng.randint(1, 3)
        gamma = rand_polytope(rng, k)
        m = Mechanism(rand_menu(rng, gamma))
        b = m.payoff_function()
        x = tuple(Fraction(rng.randint(0, 12), 4) for _ in range(k))
        _, s = choose(m, x)
        assert s == dir_derivative(b, x, x) - evaluate(b, x)


def test_menu_rejects_outside_allocations(cube1):
    with pytest.raises(ValueError):
        menu([((2,), 0)], cube1)


def test_verify_ic_menu_mechanisms_pass(cube1):
    m = mechanism([((0,), 0), ((1,), 2)], cube1)
    pts = [(0,), (1,), (2,), (3,)]
    assert verify_ic(m, pts).passed
    assert verify_ic(m, [(1,)]).passed  # single point, no pairs


def test_verify_ic_catches_perturbed_table(exact):
    # bump one payment by a tenth; the pairwise check must see it
    table = TabularMechanism(
        (
            ((0,), (0,), Fraction(0)),
            ((2,), (1,), Fraction(21, 10)),
            ((3,), (1,), Fraction(2)),
        )
    )
    rep = verify_ic(table, [(0,), (2,), (3,)])
    assert not rep.passed
    assert any(v.slack >= Fraction(1, 10) for v in rep.violations)


def test_verify_ir_and_npt(cube1):
    m = mechanism([((0,), 0), ((1,), 2)], cube1)
    assert verify_ir(m, [(0,), (1,), (3,)]).passed
    assert verify_npt(m).passed
    pay_buyer = mechanism([((0,), -1)], cube1)
    assert not verify_npt(pay_buyer).passed
    assert verify_ir(pay_buyer, [(0,), (2,)]).passed
    neg = mechanism([((1,), Fraction(-1, 2)), ((0,), 0)], cube1)
    rep = verify_npt(neg)
    assert not rep.passed
    assert any(v.slack == Fraction(1, 2) for v in rep.violations)


def test_normalize_npt(cube1):
    mn = menu([((0,), -1), ((1,), 1)], cube1)
    out = normalize_npt(mn)
    assert set(out.items) == {((Fraction(0),), Fraction(0)), ((Fraction(1),), Fraction(2))}
    ok = menu([((0,), 0), ((1,), 2)], cube1)
    assert normalize_npt(ok) is ok


def test_normalize_npt_preserves_payoff_differences(exact):
    rng = random.Random(4)
    cube2 = make_standard("cube", 2)
    for _ in range(20):
        items = [
            (
                (Fraction(rng.randint(0, 4), 4), Fraction(rng.randint(0, 4), 4)),
                Fraction(rng.randint(-6, 6), 4),
            )
            for _ in range(4)
        ]
        mn = menu(items, cube2)
        out = normalize_npt(mn)
        m_in, m_out = Mechanism(mn), Mechanism(out)
        assert verify_npt(m_out).passed or payoff(m_out, (0, 0)) <= 0
        assert payoff(m_out, (0, 0)) == 0
        for _ in range(10):
            x = tuple(Fraction(rng.randint(0, 8), 4) for _ in range(2))
            y = tuple(Fraction(rng.randint(0, 8), 4) for _ in range(2))
            assert payoff(m_in, x) - payoff(m_in, y) == payoff(m_out, x) - payoff(m_out, y)


def test_revenue_fixed_price_on_two_types(cube1):
    X = discrete_valuation([(1,), (2,)], [Fraction(1, 2), Fraction(1, 2)])
    assert revenue(Mechanism(fixed_price_menu(cube1, 1)), X) == 1
    assert revenue(Mechanism(null_menu(cube1)), X) == 0


def test_revenue_shift_by_payoff_at_origin(exact):
    # normalization changes every payment by the same amount, so revenue
    # moves by exactly the payoff at the origin
    rng = random.Random(12)
    cube2 = make_standard("cube", 2)
    for _ in range(10):
        items = [
            (
                (Fraction(rng.randint(0, 4), 4), Fraction(rng.randint(0, 4), 4)),
                Fraction(rng.randint(-6, 6), 4),
            )
            for _ in range(4)
        ]
        mn = menu(items, cube2)
        X = rand_valuation(rng, 4, 2)
        b0 = payoff(Mechanism(mn), (0, 0))
        assert revenue(Mechanism(normalize_npt(mn)), X) == revenue(Mechanism(mn), X) + b0


def test_monotone_payment_bundle_menu(cube2):
    grid = lattice_closure([(0, 0), (1, 1), (2, 2), (1, 0), (0, 1)], midpoints=True)
    mb = Mechanism(bundle_price_menu(cube2, 2))
    assert verify_monotone_payment(mb, grid).passed
    assert verify_monotone_payment(mb, [(1, 1)]).passed  # single point


def test_monotone_payment_brute_force_agreement(exact):
    rng = random.Random(31)
    grid = [(Fraction(i), Fraction(j)) for i in range(3) for j in range(3)]
    for _ in range(20):
        m = Mechanism(rand_menu(rng, make_standard("cube", 2)))
        rep = verify_monotone_payment(m, grid)
        brute = []
        for x in grid:
            for y in grid:
                if x != y and all(a <= b for a, b in zip(x, y)):
                    if choose(m, y)[1] < choose(m, x)[1]:
                        brute.append((x, y))
        assert rep.passed == (not brute)
        assert len(rep.violations) == len(brute)


def test_monotone_allocation(cube1, cube2):
    free_max = mechanism([((1, 0), 0), ((0, 1), 0)], cube2)
    rep = verify_monotone_allocation(free_max, [(2, 1), (2, 3)])
    assert not rep.passed  # switches branch between comparable points
    m1 = mechanism([((0,), 0), ((1,), 2)], cube1)
    assert verify_monotone_allocation(m1, [(0,), (1,), (2,), (3,)]).passed
    mb = Mechanism(bundle_price_menu(cube2, 2))
    grid = lattice_closure([(0, 0), (2, 2)], midpoints=True)
    assert verify_monotone_allocation(mb, grid).passed


def test_chain_menus_are_payment_monotone_and_supermodular(exact):
    from mechkit.convexfn import check_supermodular

    rng = random.Random(77)
    grid = [(Fraction(i, 2), Fraction(j, 2)) for i in range(5) for j in range(5)]
    for _ in range(25):
        m = Mechanism(rand_chain_menu(rng, 2))
        assert verify_monotone_payment(m, grid).passed
        assert check_supermodular(m.payoff_function(), grid)[0]


def test_choose_tie_favorable(cube2):
    mb = Mechanism(bundle_price_menu(cube2, 2))
    assert choose_tie_favorable(mb, (1, 1)) == ((1, 1), 2)
    free_max = mechanism([((1, 0), 0), ((0, 1), 0)], cube2)
    with pytest.raises(ValueError):
        choose_tie_favorable(free_max, (1, 1))


def test_payoff_function_in_admissible_class_after_normalization(exact):
    from mechkit.convexfn import is_in_B_gamma

    rng = random.Random(6)
    cube2 = make_standard("cube", 2)
    probes = [(Fraction(i), Fraction(j)) for i in range(3) for j in range(3)]
    for _ in range(10):
        mn = rand_menu(rng, cube2)
        b = Mechanism(normalize_npt(mn)).payoff_function()
        assert is_in_B_gamma(b, cube2, probes).passed


def test_default_verification_grid_contains_support_and_origin(exact):
    X = discrete_valuation([(1, 2), (3, 1)], [Fraction(1, 2), Fraction(1, 2)])
    grid = default_verification_grid(X)
    assert (Fraction(0), Fraction(0)) in grid
    for x in X.support:
        assert x in grid


def test_lattice_closure_cap(exact):
    pts = [(Fraction(i), Fraction(j)) for i in range(9) for j in range(9)]
    with pytest.raises(ValueError):
        lattice_closure(pts, midpoints=True, cap=64)
