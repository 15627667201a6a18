"""Limits of mechanism sequences and revenue upper-semicontinuity.

The pipeline realizes the existence argument numerically:

1. :func:`limit_payoff` evaluates the buyer payoff functions of a mechanism
   sequence on a grid and declares pointwise convergence when a trailing
   window of iterates agrees within tolerance.
2. :func:`build_limit_mechanism` reconstructs a seller-favorable mechanism
   from the limit values: at each grid point it fits a supporting-hyperplane
   gradient inside the allocation set, maximal in the direction of the point
   itself, and turns it into a menu item.  Any true direction-maximal
   subgradient of the limit satisfies the fit constraints, so the rebuilt
   payments at grid points dominate the true seller-favorable payments.
3. :func:`check_usc` compares the revenue sequence against the rebuilt limit
   mechanism's revenue: for finite-support (hence integrable) valuations the
   trailing-window limsup estimate must not exceed it.

``infinite_expectation_demo`` exercises the one setting where the conclusion
genuinely fails: a valuation with P[X >= t] = 1/(t+1) has infinite
expectation, fixed prices p collect p/(p+1) approaching 1, yet the pointwise
limit of the escaping-price payoff functions is the null mechanism with
revenue 0.  Truncations restore finite expectation and with it the
upper-semicontinuity of revenue.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import lp
from .allocation import AllocationSet, make_standard
from .mechanism import (
    Mechanism,
    Menu,
    VerificationReport,
    choose,
    mechanism,
    payoff,
    revenue,
    verify_monotone_payment,
)
from .numeric import (
    Number,
    Vector,
    dot,
    exact_mode,
    num,
    tolerance,
    vec,
    zero_vec,
)
from .solver import DiscreteValuation

DEFAULT_N_MAX = 48
DEFAULT_WINDOW = 5


@dataclass(frozen=True)
class MechanismSequence:
    """A pure function n >= 1 -> mechanism, all over one allocation set."""

    gamma: AllocationSet
    generate: Callable[[int], Mechanism]
    name: str = "sequence"
    params: tuple = ()


@dataclass(frozen=True)
class LimitResult:
    grid: tuple
    values: tuple  # final payoff values per grid point
    converged: bool
    sup_gap: Number
    n_stop: int


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    grid: tuple
    limit_values: tuple
    limit_mechanism: Mechanism
    sup_gap: Number
    revenue_sequence: tuple
    usc_holds: bool
    usc_slack: Number
    pointwise_ok: bool
    pointwise_violations: tuple
    n_max: int
    window: int


# ---------------------------------------------------------------------------
# schedules and families
# ---------------------------------------------------------------------------


def approach_schedule(limit, delta, power: int = 1):
    """n -> limit + delta / n^power."""
    limit = num(limit)
    delta = num(delta)

    def schedule(n: int):
        return limit + delta / num(n) ** power

    return schedule


def escaping_schedule(scale=1):
    """n -> scale * n (prices that run away)."""
    scale = num(scale)

    def schedule(n: int):
        return scale * num(n)

    return schedule


def geometric_schedule(limit, delta, ratio=None):
    """n -> limit + delta * ratio^n (fast, sign-preserving approach)."""
    limit = num(limit)
    delta = num(delta)
    if ratio is None:
        ratio = Fraction(1, 2) if exact_mode() else 0.5
    ratio = num(ratio)

    def schedule(n: int):
        return limit + delta * ratio**n

    return schedule


def truncated_geometric_schedule(limit, delta, cutoff: int = 30, ratio=None):
    """Geometric approach that lands exactly on the limit at the cutoff.

    Useful when downstream checks need exact ties at the limit (a pure
    geometric approach never quite reaches them in rational arithmetic)."""
    limit = num(limit)
    delta = num(delta)
    if ratio is None:
        ratio = Fraction(1, 2) if exact_mode() else 0.5
    ratio = num(ratio)
    floor = ratio**cutoff

    def schedule(n: int):
        return limit + delta * max(num(0), ratio**n - floor)

    return schedule


def fixed_price_family(gamma: AllocationSet, price_schedule) -> MechanismSequence:
    """Single-good fixed-price mechanisms with a price schedule."""
    if gamma.dim != 1:
        raise ValueError("fixed_price_family is for one good")

    def gen(n: int) -> Mechanism:
        return mechanism([((0,), 0), ((1,), price_schedule(n))], gamma, validate=False)

    return MechanismSequence(gamma, gen, name="fixed_price")


def bundle_price_family(gamma: AllocationSet, price_schedule) -> MechanismSequence:
    k = gamma.dim
    ones = tuple(num(1) for _ in range(k))

    def gen(n: int) -> Mechanism:
        return mechanism(
            [(zero_vec(k), 0), (ones, price_schedule(n))], gamma, validate=False
        )

    return MechanismSequence(gamma, gen, name="bundle_price")


def scaled_menu_family(base: Menu, factor_schedule) -> MechanismSequence:
    """Payments of a base menu scaled by factor(n)."""

    def gen(n: int) -> Mechanism:
        f = num(factor_schedule(n))
        return Mechanism(
            Menu(items=tuple((g, f * t) for g, t in base.items), gamma=base.gamma)
        )

    return MechanismSequence(base.gamma, gen, name="scaled_menu")


def perturbed_menu_family(base: Menu, deltas: Sequence, decay=None) -> MechanismSequence:
    """Item payments perturbed by delta_j * decay^n around the base menu.

    Negative deltas approach the limit from below (payments increasing), the
    seller-favorable direction.
    """
    if decay is None:
        decay = Fraction(1, 2) if exact_mode() else 0.5
    decay = num(decay)
    ds = tuple(num(d) for d in deltas)
    if len(ds) != len(base.items):
        raise ValueError("one delta per menu item")

    def gen(n: int) -> Mechanism:
        w = decay**n
        return Mechanism(
            Menu(
                items=tuple((g, t + d * w) for (g, t), d in zip(base.items, ds)),
                gamma=base.gamma,
            )
        )

    return MechanismSequence(base.gamma, gen, name="perturbed_menu")


def menu_list_family(menus: Sequence[Menu]) -> MechanismSequence:
    """Explicit list of menus; the last one repeats beyond the end."""
    if not menus:
        raise ValueError("need at least one menu")

    def gen(n: int) -> Mechanism:
        return Mechanism(menus[min(n, len(menus)) - 1])

    return MechanismSequence(menus[0].gamma, gen, name="menu_list")


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def linspace(hi, count: int) -> tuple:
    hi = num(hi)
    if count < 2:
        return (num(0),)
    step = hi / (count - 1)
    return tuple(num(0) + step * i for i in range(count))


def default_grid(
    k: int,
    X: DiscreteValuation | None = None,
    per_axis: int | None = None,
    hi=None,
) -> tuple:
    """Box grid over [0, 2 * max support coordinate]^k, support included."""
    if per_axis is None:
        per_axis = 9 if k <= 2 else 5
        if k > 3:
            raise ValueError("specify per_axis explicitly for k > 3")
    if hi is None:
        if X is None:
            hi = num(2)
        else:
            hi = 2 * max(max(x) for x in X.support)
            if hi == 0:
                hi = num(2)
    axis = linspace(hi, per_axis)
    pts = list(itertools.product(axis, repeat=k))
    if X is not None:
        have = set(pts)
        for x in X.support:
            if x not in have:
                have.add(x)
                pts.append(x)
    return tuple(pts)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def limit_payoff(
    seq: MechanismSequence,
    grid: Sequence[Sequence],
    n_max: int = DEFAULT_N_MAX,
    tol=None,
    window: int = DEFAULT_WINDOW,
) -> LimitResult:
    """Evaluate payoff functions on the grid until a trailing window agrees.

    No subsequence extraction is attempted: the harness reports
    non-convergence rather than selecting subsequences, so callers supply
    convergent families.
    """
    if not grid:
        raise ValueError("need a nonempty grid")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if tol is None:
        tol = Fraction(1, 10**12) if exact_mode() else 1e-9
    pts = [vec(x) for x in grid]
    history = []
    sup_gap = None
    for n in range(1, n_max + 1):
        m = seq.generate(n)
        vals = tuple(payoff(m, x) for x in pts)
        history.append(vals)
        if len(history) > window:
            history.pop(0)
        if len(history) == window:
            sup_gap = max(
                abs(a - b) for past in history[:-1] for a, b in zip(past, vals)
            )
            if sup_gap < tol:
                return LimitResult(tuple(pts), vals, True, sup_gap, n)
    return LimitResult(tuple(pts), history[-1], False, sup_gap, n_max)


def _fit_gradient_interval(gamma: AllocationSet, grid, values, idx):
    """k=1 closed form: the feasible slope interval, upper end."""
    x = grid[idx][0]
    vx = values[idx]
    lo_env = None
    hi_env = None
    for j, y in enumerate(grid):
        if j == idx:
            continue
        dy = y[0] - x
        slope = (values[j] - vx) / dy
        if dy > 0:
            hi_env = slope if hi_env is None else min(hi_env, slope)
        else:
            lo_env = slope if lo_env is None else max(lo_env, slope)
    pts = [p[0] for p in gamma.points()]
    glo, ghi = min(pts), max(pts)
    lo = glo if lo_env is None else max(glo, lo_env)
    hi = ghi if hi_env is None else min(ghi, hi_env)
    t = tolerance()
    if lo > hi + t:
        return None
    return hi


def _fit_gradient(gamma: AllocationSet, grid, values, idx):
    """Gradient in the set satisfying all grid subgradient inequalities,
    maximal in the direction of the grid point itself."""
    x = grid[idx]
    vx = values[idx]
    k = gamma.dim
    if gamma.is_finite:
        t = tolerance()
        best = None
        for g in gamma.points():
            if all(
                dot(g, tuple(a - b for a, b in zip(grid[j], x))) <= values[j] - vx + t
                for j in range(len(grid))
                if j != idx
            ):
                score = dot(g, x)
                if best is None or score > best[0] or (score == best[0] and g > best[1]):
                    best = (score, g)
        return None if best is None else best[1]
    if k == 1:
        g = _fit_gradient_interval(gamma, grid, values, idx)
        return None if g is None else (g,)
    rows = []
    rhs = []
    if gamma.halfspaces is not None:
        for n_, b in gamma.halfspaces:
            rows.append(list(n_))
            rhs.append(b)
        for j, y in enumerate(grid):
            if j == idx:
                continue
            rows.append([a - b for a, b in zip(y, x)])
            rhs.append(values[j] - vx)
        res = lp.solve_lp_via_dual(list(x), rows, rhs)
        if res.status != lp.OPTIMAL:
            return None
        return tuple(res.x)
    # vertices only: hull weights
    verts = gamma.points()
    nv = len(verts)
    a_ub = []
    b_ub = []
    for j, y in enumerate(grid):
        if j == idx:
            continue
        d = tuple(a - b for a, b in zip(y, x))
        a_ub.append([dot(v, d) for v in verts])
        b_ub.append(values[j] - vx)
    a_eq = [[num(1)] * nv]
    b_eq = [num(1)]
    res = lp.solve_lp([dot(v, x) for v in verts], a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
    if res.status != lp.OPTIMAL:
        return None
    g = list(zero_vec(k))
    for w, v in zip(res.x, verts):
        if w != 0:
            for i in range(k):
                g[i] += w * v[i]
    return tuple(g)


def _prune_covered(items, pts, vals):
    """Drop menu items whose grid touch set is covered by the rest.

    A fitted hyperplane that touches the data only where other items already
    touch it carries no independent grid information; it is typically an
    artifact of the fit being unconstrained beyond the grid box (no data caps
    the gradient there).  The last toucher of any grid point is never
    dropped, so the rebuilt payoff on the grid is unchanged.
    """
    t = tolerance() if exact_mode() else 1e-7
    touch = []
    for g, pay in items:
        touch.append(
            frozenset(
                j for j, x in enumerate(pts) if abs(dot(g, x) - pay - vals[j]) <= t
            )
        )
    alive = set(range(len(items)))
    while True:
        counts = {}
        for i in alive:
            for j in touch[i]:
                counts[j] = counts.get(j, 0) + 1
        droppable = [
            i for i in alive if all(counts[j] >= 2 for j in touch[i])
        ]
        if not droppable:
            break
        droppable.sort(key=lambda i: (len(touch[i]), -items[i][1], items[i][0]))
        i = droppable[0]
        alive.discard(i)
    return [items[i] for i in sorted(alive)]


def build_limit_mechanism(
    values: Sequence,
    gamma: AllocationSet,
    grid: Sequence[Sequence],
    prune_uninformative: bool = True,
) -> Mechanism:
    """Menu of supporting hyperplanes fitted to limit values on a grid.

    Each grid point contributes the feasible gradient maximal in the
    direction of the point itself, mirroring the seller-favorable selection;
    any true direction-maximal subgradient of the limit satisfies the fit
    constraints, so the rebuilt payments at grid points dominate the true
    seller-favorable ones.  Fails when some grid point admits no gradient in
    the set, which for a genuine sequence of admissible payoff functions
    signals grid or tolerance trouble (the limit values are then inconsistent
    with convexity or with subgradients in the set).
    """
    pts = [vec(x) for x in grid]
    vals = [num(v) for v in values]
    if len(pts) != len(vals):
        raise ValueError("one value per grid point")
    items = []
    seen = set()
    for idx, x in enumerate(pts):
        g = _fit_gradient(gamma, pts, vals, idx)
        if g is None:
            raise ValueError(
                f"no feasible gradient in the allocation set at grid point {x}: "
                "limit values are not an admissible payoff function on this grid"
            )
        it = (g, dot(g, x) - vals[idx])
        if it not in seen:
            seen.add(it)
            items.append(it)
    if prune_uninformative:
        items = _prune_covered(items, pts, vals)
    m = mechanism(items, gamma, validate=False)
    t = tolerance() if exact_mode() else 1e-7
    for x, v in zip(pts, vals):
        got = payoff(m, x)
        if abs(got - v) > t:
            raise ValueError(
                f"rebuilt menu does not reproduce the limit value at {x}: "
                f"{got} vs {v}"
            )
    return m


def pad_grid(grid: Sequence[Sequence]) -> tuple:
    """Product grid extended one layer beyond the top in every axis.

    Fitting on the padded grid keeps boundary artifacts (gradients
    unconstrained from above) away from the original points.
    """
    pts = [vec(x) for x in grid]
    k = len(pts[0])
    axes = []
    for i in range(k):
        vals = sorted({p[i] for p in pts})
        step = max(
            (b - a for a, b in zip(vals, vals[1:])), default=num(1)
        )
        axes.append(vals + [vals[-1] + step])
    out = list(itertools.product(*axes))
    have = set(out)
    for p in pts:
        if p not in have:
            have.add(p)
            out.append(p)
    return tuple(out)


def check_usc(
    seq: MechanismSequence,
    limit_mechanism: Mechanism,
    X: DiscreteValuation,
    n_max: int = DEFAULT_N_MAX,
    window: int = DEFAULT_WINDOW,
    limit_result: LimitResult | None = None,
    usc_tol=None,
) -> ConvergenceReport:
    """Revenue upper-semicontinuity against the given limit mechanism.

    The limsup of the revenue sequence is estimated by the maximum over the
    trailing window; the same window estimates the pointwise payment limsup
    at every support point.  ``usc_tol`` absorbs the finite-window estimation
    error (default 1e-9 in both numeric modes; the exact slack is still
    reported): sequences that approach their limit from above can leave a
    slack of order window / n_max^2 below zero without contradicting
    anything.
    """
    if usc_tol is None:
        usc_tol = Fraction(1, 10**9) if exact_mode() else 1e-9
    revs = []
    window_mechs = []
    for n in range(1, n_max + 1):
        m = seq.generate(n)
        revs.append(revenue(m, X))
        if n > n_max - window:
            window_mechs.append(m)
    limsup_est = max(revs[-window:])
    limit_rev = revenue(limit_mechanism, X)
    usc_slack = limit_rev - limsup_est
    usc_holds = usc_slack >= -usc_tol

    pointwise_violations = []
    for x in X.support:
        s_lim = choose(limit_mechanism, x)[1]
        s_win = max(choose(m, x)[1] for m in window_mechs)
        if s_win > s_lim + usc_tol:
            pointwise_violations.append((x, s_win - s_lim))
    lr = limit_result
    return ConvergenceReport(
        converged=lr.converged if lr else True,
        grid=lr.grid if lr else (),
        limit_values=lr.values if lr else (),
        limit_mechanism=limit_mechanism,
        sup_gap=lr.sup_gap if lr else num(0),
        revenue_sequence=tuple(revs),
        usc_holds=usc_holds,
        usc_slack=usc_slack,
        pointwise_ok=not pointwise_violations,
        pointwise_violations=tuple(pointwise_violations),
        n_max=n_max,
        window=window,
    )


def run_pipeline(
    seq: MechanismSequence,
    X: DiscreteValuation,
    grid: Sequence[Sequence] | None = None,
    n_max: int = DEFAULT_N_MAX,
    tol=None,
    window: int = DEFAULT_WINDOW,
    usc_tol=None,
) -> ConvergenceReport:
    """limit_payoff -> build_limit_mechanism -> check_usc, with defaults."""
    if grid is None:
        grid = default_grid(seq.gamma.dim, X)
    else:
        grid = tuple(vec(x) for x in grid)
        have = set(grid)
        grid += tuple(x for x in X.support if x not in have)
    lr = limit_payoff(seq, grid, n_max=n_max, tol=tol, window=window)
    # keep every supporting item: extra boundary items only raise the limit
    # mechanism's payments, which is the safe direction for the usc check
    limit_mech = build_limit_mechanism(
        lr.values, seq.gamma, lr.grid, prune_uninformative=False
    )
    return check_usc(
        seq, limit_mech, X, n_max=n_max, window=window, limit_result=lr,
        usc_tol=usc_tol,
    )


# ---------------------------------------------------------------------------
# the infinite-expectation demonstration
# ---------------------------------------------------------------------------


def harmonic_tail_distribution(n_truncation: int) -> DiscreteValuation:
    """Discrete valuation with P[X >= n] = 1/(n+1), truncated at n_truncation.

    Mass 1/((n+1)(n+2)) sits at n = 0 .. N-1 and the whole tail mass 1/(N+1)
    at N, so every tail probability P[X >= p] with p <= N is preserved
    exactly and with it the revenue of every fixed price up to N.  The
    untruncated distribution has infinite expectation; every truncation is
    integrable.
    """
    N = n_truncation
    if N < 2:
        raise ValueError("need a truncation point of at least 2")
    support = [(num(n),) for n in range(N + 1)]
    probs = [num(1) / ((num(n) + 1) * (num(n) + 2)) for n in range(N)]
    probs.append(num(1) / (num(N) + 1))
    return DiscreteValuation(support=tuple(support), probs=tuple(probs))


@dataclass(frozen=True)
class PriceRevenueRow:
    price: Number
    model_revenue: Number  # p / (p + 1)
    truncated_revenue: Number
    exact_match: bool


@dataclass(frozen=True)
class InfiniteExpectationReport:
    truncation: int
    price_rows: tuple
    escaping_ns: tuple
    escaping_model_revenues: tuple  # n / (n + 1), the untruncated values
    escaping_checked: tuple  # (n, revenue on the truncation) for sampled n
    sup_escaping_revenue: Number
    limit_mechanism: Mechanism
    limit_revenue: Number
    truncated_usc_slack: Number


def infinite_expectation_demo(
    n_truncation: int,
    price_schedule: Sequence | None = None,
    escape_display: int = 16,
) -> InfiniteExpectationReport:
    """Fixed-price revenues on the heavy-tailed model and its truncations.

    Shows p * P[X >= p] = p/(p+1) exactly for p up to the truncation point,
    and that the escaping-price family collects revenue approaching 1 while
    its pointwise-limit mechanism is null and collects 0.  On the truncation
    itself (finite expectation) the escaping prices eventually sell nothing,
    so upper semicontinuity holds there.
    """
    N = n_truncation
    X = harmonic_tail_distribution(N)
    gamma = make_standard("cube", 1)
    if price_schedule is None:
        price_schedule = [p for p in (1, 10, 100, 999) if p <= N]
    rows = []
    for p in price_schedule:
        p = num(p)
        model = p / (p + 1)
        mech = mechanism([((0,), 0), ((1,), p)], gamma)
        got = revenue(mech, X)
        rows.append(PriceRevenueRow(p, model, got, got == model))

    seq = fixed_price_family(gamma, escaping_schedule(1))
    ns = tuple(range(1, escape_display + 1)) + (N // 2, N)
    ns = tuple(sorted(set(n for n in ns if 1 <= n <= N)))
    model_revs = tuple(num(n) / (num(n) + 1) for n in ns)
    sampled = tuple(sorted(set((1, 2, min(7, N), N // 2, N))))
    checked = tuple((n, revenue(seq.generate(n), X)) for n in sampled)

    grid = default_grid(1, None, per_axis=9, hi=8)
    lr = limit_payoff(seq, grid, n_max=max(2 * len(grid), 24))
    limit_mech = build_limit_mechanism(lr.values, gamma, lr.grid)
    limit_rev = revenue(limit_mech, X)

    # on the truncation the family eventually prices everyone out, so the
    # trailing window beyond N collects nothing and the slack is clean
    tail_window = [revenue(seq.generate(n), X) for n in range(N + 1, N + 4)]
    truncated_usc_slack = limit_rev - max(tail_window)

    return InfiniteExpectationReport(
        truncation=N,
        price_rows=tuple(rows),
        escaping_ns=ns,
        escaping_model_revenues=model_revs,
        escaping_checked=checked,
        sup_escaping_revenue=max(model_revs),
        limit_mechanism=limit_mech,
        limit_revenue=limit_rev,
        truncated_usc_slack=truncated_usc_slack,
    )


# ---------------------------------------------------------------------------
# monotone subclasses under limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneLimitReport:
    mode: str
    premise_ok: bool  # every sequence member had the property on the grid
    limit_report: VerificationReport
    supermodular_ok: bool | None
    converged: bool


def monotone_limit_check(
    seq: MechanismSequence,
    X: DiscreteValuation,
    grid: Sequence[Sequence],
    mode: str = "payment",
    n_max: int = DEFAULT_N_MAX,
    window: int = DEFAULT_WINDOW,
    premise_ns: Sequence[int] | None = None,
) -> MonotoneLimitReport:
    """Check that the property survives the limit on the grid.

    ``payment`` mode verifies payment monotonicity of every member and of the
    rebuilt seller-favorable limit; ``allocation`` mode tracks supermodularity
    of the payoff functions, which is what survives pointwise limits.
    ``premise_ns`` restricts the member check to the given indices (all of
    1..n_max by default).
    """
    from .convexfn import check_supermodular

    grid = tuple(vec(x) for x in grid)
    if premise_ns is None:
        premise_ns = range(1, n_max + 1)
    premise_ok = True
    for n in premise_ns:
        m = seq.generate(n)
        if mode == "payment":
            if not verify_monotone_payment(m, grid).passed:
                premise_ok = False
                break
        else:
            ok, _ = check_supermodular(m.payoff_function(), grid)
            if not ok:
                premise_ok = False
                break
    fit_grid = pad_grid(grid)
    lr = limit_payoff(seq, fit_grid, n_max=n_max, window=window)
    limit_mech = build_limit_mechanism(lr.values, seq.gamma, lr.grid)
    supermodular_ok = None
    if mode == "payment":
        limit_report = verify_monotone_payment(limit_mech, grid)
    else:
        from .mechanism import verify_monotone_allocation

        supermodular_ok, _ = check_supermodular(limit_mech.payoff_function(), grid)
        limit_report = verify_monotone_allocation(limit_mech, grid)
    return MonotoneLimitReport(
        mode=mode,
        premise_ok=premise_ok,
        limit_report=limit_report,
        supermodular_ok=supermodular_ok,
        converged=lr.converged,
    )


@dataclass(frozen=True)
class WrongWayTieBreak:
    """A mechanism wrapper that breaks payoff ties against the seller at the
    given points.  Still incentive compatible (it picks among the buyer's
    best items) but deliberately not seller favorable."""

    base: Mechanism
    wrong_points: tuple

    def choose(self, x):
        x = vec(x)
        if x in self.wrong_points:
            from .numeric import active_cutoff

            vals = [dot(g, x) - t for g, t in self.base.menu.items]
            cutoff = active_cutoff(max(vals))
            worst = None
            for (g, t), v in zip(self.base.menu.items, vals):
                if v >= cutoff:
                    if worst is None or t < worst[1] or (t == worst[1] and g < worst[0]):
                        worst = (g, t)
            return worst
        return choose(self.base, x)


@dataclass(frozen=True)
class WrongWayDemo:
    sequence_monotone: bool
    seller_favorable_report: VerificationReport
    wrong_way_report: VerificationReport
    tie_point: Vector
    limit_mechanism: Mechanism


def wrong_way_monotonicity_demo() -> WrongWayDemo:
    """Limit of monotone mechanisms, tie broken the wrong way, loses
    monotonicity.

    The members sell good 1 at prices rising to 1.  The limit's tie set
    {x1 = 1} contains comparable points; taking the zero-payment option at
    (1, 1) but the sale at (1, 0) makes payments decrease upward.
    """
    gamma = make_standard("cube", 2)
    schedule = truncated_geometric_schedule(1, -1, cutoff=24)

    def gen(n: int) -> Mechanism:
        return mechanism(
            [((0, 0), 0), ((1, 0), schedule(n))], gamma, validate=False
        )

    seq = MechanismSequence(gamma, gen, name="good1_price")
    grid = tuple(
        (num(a), num(b)) for a in (0, Fraction(1, 2), 1, 2) for b in (0, 1, 2)
    )
    premise_ok = all(
        verify_monotone_payment(seq.generate(n), grid).passed for n in range(1, 33)
    )
    lr = limit_payoff(seq, pad_grid(grid), n_max=40)
    limit_mech = build_limit_mechanism(lr.values, gamma, lr.grid)
    good = verify_monotone_payment(limit_mech, grid)
    tie_point = (num(1), num(1))
    wrong = WrongWayTieBreak(limit_mech, (tie_point,))
    bad = verify_monotone_payment(wrong, grid)
    return WrongWayDemo(
        sequence_monotone=premise_ok,
        seller_favorable_report=good,
        wrong_way_report=bad,
        tie_point=tie_point,
        limit_mechanism=limit_mech,
    )
