import random
from fractions import Fraction

import pytest

from mechkit import numeric
from mechkit.allocation import finite_set, make_standard, polytope
from mechkit.mechanism import Mechanism, Menu, menu
from mechkit.numeric import num, vec
from mechkit.solver import DiscreteValuation, discrete_valuation


@pytest.fixture
def exact():
    with numeric.numeric_mode("exact"):
        yield


@pytest.fixture
def floaty():
    with numeric.numeric_mode("float"):
        yield


# ---------------------------------------------------------------------------
# seeded random generators (exact rationals on coarse lattices, so that
# payoff gaps are bounded away from zero and ties are genuine ties)
# ---------------------------------------------------------------------------


def rfrac(rng: random.Random, lo=0, hi=4, den=4) -> Fraction:
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def rand_point(rng, k, lo=0, hi=4, den=4):
    return tuple(rfrac(rng, lo, hi, den) for _ in range(k))


def rand_support(rng, n, k, lo=0, hi=4, den=4):
    pts = set()
    while len(pts) < n:
        pts.add(rand_point(rng, k, lo, hi, den))
    return sorted(pts)


def rand_probs(rng, n):
    weights = [rng.randint(1, 9) for _ in range(n)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def rand_valuation(rng, n, k, lo=0, hi=4, den=4) -> DiscreteValuation:
    return discrete_valuation(rand_support(rng, n, k, lo, hi, den), rand_probs(rng, n))


def rand_convex_combo(rng, points, den=8):
    weights = [rng.randint(0, den) for _ in points]
    if sum(weights) == 0:
        weights[rng.randrange(len(points))] = 1
    total = sum(weights)
    k = len(points[0])
    out = [Fraction(0)] * k
    for w, p in zip(weights, points):
        for i in range(k):
            out[i] += Fraction(w, total) * p[i]
    return tuple(out)


def rand_polytope(rng, k):
    """A random compact allocation set in one of three shapes."""
    shape = rng.choice(["box", "scaled_simplex", "hull"])
    if shape == "box":
        hi = [rfrac(rng, 1, 3, 2) for _ in range(k)]
        hs = []
        for i in range(k):
            normal = tuple(Fraction(1) if j == i else Fraction(0) for j in range(k))
            hs.append((normal, hi[i]))
        verts = []
        for bits in range(2**k):
            verts.append(
                tuple(hi[i] if (bits >> i) & 1 else Fraction(0) for i in range(k))
            )
        return polytope(vertices=verts, halfspaces=hs)
    if shape == "scaled_simplex":
        hi = [rfrac(rng, 1, 3, 2) for _ in range(k)]
        normal = tuple(1 / h for h in hi)
        verts = [tuple(Fraction(0) for _ in range(k))]
        for i in range(k):
            verts.append(tuple(hi[i] if j == i else Fraction(0) for j in range(k)))
        return polytope(vertices=verts, halfspaces=[(normal, Fraction(1))])
    pts = [rand_point(rng, k, 0, 2, 4) for _ in range(k + 2)]
    pts.append(tuple(Fraction(0) for _ in range(k)))
    return polytope(vertices=pts)


def rand_menu(rng, gamma, n_items=4, pay_hi=3, pay_den=8) -> Menu:
    """Random menu with allocations inside the set and a free null item."""
    verts = gamma.points()
    items = [(tuple(Fraction(0) for _ in range(gamma.dim)), Fraction(0))]
    for _ in range(n_items):
        g = rand_convex_combo(rng, verts)
        t = rfrac(rng, 0, pay_hi, pay_den)
        items.append((g, t))
    return menu(items, gamma, validate=False)


def rand_chain_menu(rng, k, n_items=4, den=8, pay_den=8) -> Menu:
    """Menu whose allocations form a chain in the componentwise order.

    Chain menus are payment monotone under seller-favorable choice and their
    payoff functions are supermodular, so they are the workhorse for the
    monotone-subclass trials."""
    gamma = make_standard("cube", k)
    g = [Fraction(0)] * k
    items = [(tuple(g), Fraction(0))]
    for _ in range(n_items):
        for i in range(k):
            room = Fraction(1) - g[i]
            if room > 0:
                step = Fraction(rng.randint(0, int(room * den)), den)
                g[i] += step
        items.append((tuple(g), rfrac(rng, 0, 3, pay_den)))
    return menu(items, gamma, validate=False)
