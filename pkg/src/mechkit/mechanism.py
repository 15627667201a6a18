"""Menus as mechanisms: choice, verification, revenue, normalization.

A :class:`Menu` is a finite list of (allocation, payment) offers over an
allocation set.  The induced :class:`Mechanism` lets the buyer pick a
payoff-maximizing item with a fixed seller-favorable tie rule: among the
buyer's tied best offers take the one with the highest payment, remaining
ties broken toward the lexicographically largest allocation.  Menu-induced
mechanisms satisfy incentive compatibility and individual rationality by
construction; the verifiers here exist to check hand-built tables, foreign
mechanisms, no-positive-transfer, and the monotonicity subclasses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .allocation import AllocationSet, contains
from .convexfn import PWLConvex, check_supermodular, pwl
from .numeric import (
    Number,
    Vector,
    active_cutoff,
    dot,
    num,
    tolerance,
    vec,
    vec_leq,
    zero_vec,
)

IC = "IC"
IR = "IR"
NPT = "NPT"
MONO_S = "MONO_S"  # payment monotonicity
MONO_Q = "MONO_Q"  # allocation monotonicity


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple  # the point or pair of points involved
    slack: Number


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    violations: tuple = ()
    notes: tuple = ()

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class Menu:
    items: tuple  # tuple of (allocation vector, payment)
    gamma: AllocationSet


@dataclass(frozen=True)
class Mechanism:
    """A menu with the seller-favorable tie rule baked in."""

    menu: Menu

    @property
    def gamma(self) -> AllocationSet:
        return self.menu.gamma

    def payoff_function(self) -> PWLConvex:
        return pwl([(g, -t) for g, t in self.menu.items])


def menu(items: Iterable[tuple], gamma: AllocationSet, validate: bool = True) -> Menu:
    """Build a menu; items are deduplicated and checked against the set."""
    seen = set()
    out = []
    for g, t in items:
        it = (vec(g), num(t))
        if it not in seen:
            seen.add(it)
            out.append(it)
    if not out:
        raise ValueError("a menu needs at least one item")
    if validate:
        for g, _ in out:
            if not contains(gamma, g):
                raise ValueError(f"menu allocation {g} is not in the allocation set")
    return Menu(items=tuple(out), gamma=gamma)


def mechanism(items: Iterable[tuple], gamma: AllocationSet, validate: bool = True) -> Mechanism:
    return Mechanism(menu(items, gamma, validate=validate))


def null_menu(gamma: AllocationSet) -> Menu:
    return menu([(zero_vec(gamma.dim), 0)], gamma)


def fixed_price_menu(gamma: AllocationSet, price) -> Menu:
    """Single good at a fixed price (k=1)."""
    if gamma.dim != 1:
        raise ValueError("fixed_price_menu is for one good")
    return menu([((0,), 0), ((1,), price)], gamma)


def bundle_price_menu(gamma: AllocationSet, price) -> Menu:
    """Everything-or-nothing at a fixed price."""
    k = gamma.dim
    return menu([(zero_vec(k), 0), (tuple(num(1) for _ in range(k)), price)], gamma)


# ---------------------------------------------------------------------------
# choice and payoff
# ---------------------------------------------------------------------------


def payoff(m: Mechanism, x: Sequence) -> Number:
    x = vec(x)
    return max(dot(g, x) - t for g, t in m.menu.items)


def _choose_from_items(items, x) -> tuple[Vector, Number]:
    vals = [dot(g, x) - t for g, t in items]
    cutoff = active_cutoff(max(vals))
    best = None
    for (g, t), v in zip(items, vals):
        if v >= cutoff:
            if best is None or t > best[1] or (t == best[1] and g > best[0]):
                best = (g, t)
    return best


def choose(m: Mechanism, x: Sequence) -> tuple[Vector, Number]:
    """Seller-favorable choice: payoff-max item, ties to max payment,
    then lexicographically largest allocation."""
    return _choose_from_items(m.menu.items, vec(x))


def choose_tie_favorable(m: Mechanism, x: Sequence) -> tuple[Vector, Number]:
    """Choice using the coordinatewise-maximal active allocation.

    This is the tie-favorable (seller- as well as buyer-favorable) selector;
    it exists for supermodular payoff functions.  Raises if the componentwise
    max of the active allocations is not itself active.
    """
    x = vec(x)
    vals = [dot(g, x) - t for g, t in m.menu.items]
    cutoff = active_cutoff(max(vals))
    active = [(g, t) for (g, t), v in zip(m.menu.items, vals) if v >= cutoff]
    top = active[0][0]
    for g, _ in active[1:]:
        top = tuple(max(a, b) for a, b in zip(top, g))
    for g, t in active:
        if g == top:
            return (g, t)
    raise ValueError(
        f"no coordinatewise-maximal active allocation at {x}: payoff function "
        "is not supermodular here"
    )


@dataclass(frozen=True)
class TabularMechanism:
    """A fixed (type -> (allocation, payment)) table, for verification only.

    Unlike a menu mechanism it carries no incentive guarantees, which is the
    point: perturbed tables exercise the verifiers' failure paths, and raw
    solver assignments are checked in this form before menu induction.
    """

    assignments: tuple  # tuple of (x, allocation, payment)

    def choose(self, x: Sequence) -> tuple[Vector, Number]:
        x = vec(x)
        for xi, g, t in self.assignments:
            if xi == x:
                return (g, t)
        raise KeyError(f"type {x} not in table")


def _choice(m, x):
    if isinstance(m, Mechanism):
        return choose(m, x)
    return m.choose(x)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_ic(m, points: Sequence[Sequence]) -> VerificationReport:
    """Pairwise incentive compatibility over the given points."""
    if not points:
        raise ValueError("need at least one point")
    pts = [vec(x) for x in points]
    table = [(x, *_choice(m, x)) for x in pts]
    t = tolerance()
    violations = []
    for xi, qi, si in table:
        own = dot(qi, xi) - si
        for xj, qj, sj in table:
            if xi == xj:
                continue
            other = dot(qj, xi) - sj
            if own < other - t:
                violations.append(Violation(IC, (xi, xj), other - own))
    return VerificationReport(passed=not violations, violations=tuple(violations))


def verify_ir(m, points: Sequence[Sequence]) -> VerificationReport:
    if not points:
        raise ValueError("need at least one point")
    t = tolerance()
    violations = []
    for x in points:
        x = vec(x)
        g, s = _choice(m, x)
        val = dot(g, x) - s
        if val < -t:
            violations.append(Violation(IR, (x,), -val))
    return VerificationReport(passed=not violations, violations=tuple(violations))


def verify_npt(m: Mechanism) -> VerificationReport:
    """No positive transfer: menu payments nonnegative and zero payoff at 0.

    For individually rational mechanisms the payoff-at-origin test is
    equivalent to a zero payment at the origin."""
    t = tolerance()
    violations = []
    min_item = min(m.menu.items, key=lambda it: it[1])
    if min_item[1] < -t:
        violations.append(Violation(NPT, (min_item[0],), -min_item[1]))
    b0 = payoff(m, zero_vec(m.gamma.dim))
    if b0 > t:
        violations.append(Violation(NPT, (zero_vec(m.gamma.dim),), b0))
    return VerificationReport(passed=not violations, violations=tuple(violations))


def normalize_npt(mn: Menu) -> Menu:
    """Shift all payments by the payoff at the origin, making it zero.

    Payoff differences are unchanged; for an individually rational menu the
    shift is nonnegative, so the revenue weakly increases.
    """
    b0 = max(-t for _, t in mn.items)
    if b0 == 0:
        return mn
    return Menu(items=tuple((g, t + b0) for g, t in mn.items), gamma=mn.gamma)


def revenue(m, X) -> Number:
    """Expected payment under the seller-favorable choice rule.

    ``X`` is anything with ``support`` and ``probs`` (a finite-support
    valuation distribution)."""
    total = num(0)
    if isinstance(m, Mechanism):
        items = m.menu.items  # support points are already normalized
        for x, p in zip(X.support, X.probs):
            if p == 0:
                continue
            total += p * _choose_from_items(items, x)[1]
        return total
    for x, p in zip(X.support, X.probs):
        if p == 0:
            continue
        _, s = m.choose(x)
        total += p * s
    return total


def verify_monotone_payment(m, grid: Sequence[Sequence]) -> VerificationReport:
    """Payments must not decrease along the componentwise order."""
    if not grid:
        raise ValueError("need a nonempty grid")
    pts = [vec(x) for x in grid]
    t = tolerance()
    table = [(x, _choice(m, x)[1]) for x in pts]
    violations = []
    for i, (x, sx) in enumerate(table):
        for j, (y, sy) in enumerate(table):
            if i == j or x == y:
                continue
            if vec_leq(x, y, tol=0) and sy < sx - t:
                violations.append(Violation(MONO_S, (x, y), sx - sy))
    return VerificationReport(passed=not violations, violations=tuple(violations))


def verify_monotone_allocation(m, grid: Sequence[Sequence]) -> VerificationReport:
    """Allocations must not decrease (componentwise) along the order.

    For menu mechanisms the report cross-checks supermodularity of the payoff
    function on the same grid, which characterizes allocation monotonicity of
    the tie-favorable selection; a disagreement between the two views is
    reported as a note, never hidden.
    """
    if not grid:
        raise ValueError("need a nonempty grid")
    pts = [vec(x) for x in grid]
    t = tolerance()
    table = [(x, _choice(m, x)[0]) for x in pts]
    violations = []
    for i, (x, qx) in enumerate(table):
        for j, (y, qy) in enumerate(table):
            if i == j or x == y:
                continue
            if vec_leq(x, y, tol=0) and not vec_leq(qx, qy, tol=t):
                worst = max(a - b for a, b in zip(qx, qy))
                violations.append(Violation(MONO_Q, (x, y), worst))
    notes = []
    if isinstance(m, Mechanism):
        supermod, _ = check_supermodular(m.payoff_function(), pts)
        mono = not violations
        if supermod != mono:
            notes.append(
                "grid allocation-monotonicity and payoff supermodularity disagree "
                f"(monotone={mono}, supermodular={supermod}); the lexicographic "
                "tie layer only approximates tie-favorable choice"
            )
        for x in pts:
            try:
                tf = choose_tie_favorable(m, x)
            except ValueError:
                notes.append(f"no tie-favorable choice at {x} (non-supermodular tie)")
                continue
            if tf != choose(m, x):
                notes.append(f"tie-favorable and lexicographic choices differ at {x}")
    return VerificationReport(
        passed=not violations, violations=tuple(violations), notes=tuple(notes)
    )


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def lattice_closure(points: Sequence[Sequence], midpoints: bool = False, cap: int = 2048) -> tuple:
    """Product lattice spanned by the points' coordinate values.

    This is a meet/join-closed superset of the input, which is where
    monotonicity and supermodularity violations of support-driven functions
    must show up.  Optionally refines each axis with midpoints.
    """
    pts = [vec(p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    k = len(pts[0])
    axes = []
    for i in range(k):
        vals = sorted({p[i] for p in pts})
        if midpoints:
            refined = []
            for a, b in zip(vals, vals[1:]):
                refined.append(a)
                refined.append((a + b) / 2)
            refined.append(vals[-1])
            vals = refined
        axes.append(vals)
    size = 1
    for a in axes:
        size *= len(a)
    if size > cap:
        raise ValueError(f"lattice of size {size} exceeds cap {cap}; pass a grid explicitly")
    return tuple(itertools.product(*axes))


def default_verification_grid(X, cap: int = 2048) -> tuple:
    """Support lattice closure with midpoints plus the origin."""
    pts = list(X.support)
    k = len(pts[0])
    pts.append(zero_vec(k))
    return lattice_closure(pts, midpoints=True, cap=cap)
