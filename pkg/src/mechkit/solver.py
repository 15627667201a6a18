"""Optimal-revenue solvers for finite-support valuation distributions.

``solve_rev`` is a linear program over a polytope allocation set: one
allocation vector and one payment per support point, incentive constraints
for every ordered pair, individual rationality and nonnegative payments, and
the probability-weighted payment sum as the objective.  The finite program
equals the optimum over all mechanisms because any feasible assignment
extends to every type through its induced menu, and restricting any
mechanism to the support stays feasible.  One wrinkle: the induced menu is
individually rational off the support only if the origin type is priced at
zero, so the program always carries the origin as an implicit
zero-probability type.  (With the all-zero allocation available this is
vacuous; for sets like the unit simplex that must always allocate, it is a
real constraint that the all-type optimum has to satisfy.)

``solve_deterministic`` enumerates allocation assignments over a finite set
and maximizes payments per assignment through a difference-constraint system
solved by Bellman-Ford relaxation: the pointwise-maximal feasible payment
vector is the shortest-path distance from a virtual source whose arcs encode
the individual-rationality caps.

The monotone variants add support-level ordering constraints.  Those are
necessary for global (all-types) monotonicity of the induced menu but
possibly not sufficient, so results are labeled as upper bounds and carry a
``certified`` flag set by grid verification of the witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from . import lp
from .allocation import AllocationSet
from .errors import CapExceededError, SchemaError
from .mechanism import (
    Mechanism,
    TabularMechanism,
    default_verification_grid,
    mechanism,
    revenue,
    verify_ic,
    verify_ir,
    verify_monotone_allocation,
    verify_monotone_payment,
    verify_npt,
)
from .numeric import (
    Number,
    Vector,
    dot,
    exact_mode,
    get_mode,
    num,
    tolerance,
    vec,
    vec_leq,
    zero_vec,
)

REV = "REV"
DREV = "DREV"
SREV = "SREV"
BREV = "BREV"
MONREV_UB = "MONREV_UB"
AMONREV_UB = "AMONREV_UB"

DEFAULT_ENUM_CAP = 10**7


@dataclass(frozen=True)
class DiscreteValuation:
    """Finite-support distribution of the buyer's valuation vector."""

    support: tuple  # tuple of k-vectors
    probs: tuple  # matching probabilities, summing to one

    @property
    def dim(self) -> int:
        return len(self.support[0])

    @cached_property
    def expectation(self) -> Vector:
        k = self.dim
        total = list(zero_vec(k))
        for x, p in zip(self.support, self.probs):
            for i in range(k):
                total[i] += p * x[i]
        return tuple(total)

    def marginal(self, i: int) -> "DiscreteValuation":
        """Distribution of coordinate i (k=1), duplicates aggregated."""
        acc = {}
        for x, p in zip(self.support, self.probs):
            acc[(x[i],)] = acc.get((x[i],), num(0)) + p
        items = sorted(acc.items())
        return DiscreteValuation(
            support=tuple(x for x, _ in items), probs=tuple(p for _, p in items)
        )

    def bundle_total(self) -> "DiscreteValuation":
        """Distribution of the coordinate sum (k=1)."""
        acc = {}
        for x, p in zip(self.support, self.probs):
            s = (sum(x),)
            acc[s] = acc.get(s, num(0)) + p
        items = sorted(acc.items())
        return DiscreteValuation(
            support=tuple(x for x, _ in items), probs=tuple(p for _, p in items)
        )

    def scaled(self, factor) -> "DiscreteValuation":
        f = num(factor)
        if f <= 0:
            raise ValueError("scale factor must be positive")
        return DiscreteValuation(
            support=tuple(tuple(f * c for c in x) for x in self.support),
            probs=self.probs,
        )


def discrete_valuation(support: Sequence[Sequence], probs: Sequence) -> DiscreteValuation:
    """Validated constructor: distinct nonnegative support, probabilities
    summing to one (exactly in rational mode, 1e-12 otherwise)."""
    sup = tuple(vec(x) for x in support)
    pr = tuple(num(p) for p in probs)
    if not sup:
        raise SchemaError("support must be nonempty")
    if len(sup) != len(pr):
        raise SchemaError("support and probability lists differ in length")
    k = len(sup[0])
    seen = set()
    for x in sup:
        if len(x) != k:
            raise SchemaError("support points must share one dimension")
        if any(c < 0 for c in x):
            raise SchemaError(f"support point {x} has a negative coordinate")
        if x in seen:
            raise SchemaError(f"duplicate support point {x}")
        seen.add(x)
    if any(p < 0 for p in pr):
        raise SchemaError("probabilities must be nonnegative")
    total = sum(pr)
    if exact_mode():
        if total != 1:
            raise SchemaError(f"probabilities sum to {total}, expected exactly 1")
    elif abs(total - 1.0) > 1e-12:
        raise SchemaError(f"probabilities sum to {total!r}, expected 1 within 1e-12")
    return DiscreteValuation(support=sup, probs=pr)


@dataclass(frozen=True)
class SolveResult:
    optimal_revenue: Number
    mechanism: Mechanism
    class_label: str
    certified: bool
    diagnostics: dict


# ---------------------------------------------------------------------------
# LP solver over a polytope allocation set
# ---------------------------------------------------------------------------


def _with_origin(X: DiscreteValuation):
    """Support plus the origin as an implicit zero-probability type."""
    origin = zero_vec(X.dim)
    types = list(X.support)
    weights = list(X.probs)
    if origin not in types:
        types.append(origin)
        weights.append(num(0))
    return types, weights


def _gamma_rows(gamma: AllocationSet):
    if gamma.halfspaces is not None:
        return [(list(n), b) for n, b in gamma.halfspaces], None
    return None, gamma.points()


def _build_rev_lp(gamma, types, weights, mono_mode=None):
    """Rows/objective for the revenue LP.  Variables are per-type alloc
    coordinates (or hull weights when only vertices are known) plus one
    payment; returns everything needed to solve and to read back."""
    n = len(types)
    k = gamma.dim
    hrows, verts = _gamma_rows(gamma)
    use_hull = hrows is None
    nv = len(verts) if use_hull else 0
    per = nv if use_hull else k  # allocation variables per type
    nvars = n * per + n

    def avar(i, j):
        return i * per + j

    def svar(i):
        return n * per + i

    def alloc_coeffs(i, coef_vec, row):
        # add coef . q_i to the row
        if use_hull:
            for j, v in enumerate(verts):
                row[avar(i, j)] += dot(coef_vec, v)
        else:
            for j in range(k):
                row[avar(i, j)] += coef_vec[j]

    zero_row = lambda: [num(0)] * nvars
    a_ub, b_ub, a_eq, b_eq = [], [], [], []

    for i, x in enumerate(types):
        if use_hull:
            row = zero_row()
            for j in range(nv):
                row[avar(i, j)] = num(1)
            a_eq.append(row)
            b_eq.append(num(1))
        else:
            for normal, off in hrows:
                row = zero_row()
                alloc_coeffs(i, normal, row)
                a_ub.append(row)
                b_ub.append(off)
        # IR: s_i - q_i . x_i <= 0
        row = zero_row()
        alloc_coeffs(i, tuple(-c for c in x), row)
        row[svar(i)] += num(1)
        a_ub.append(row)
        b_ub.append(num(0))
    # IC: q_j . x_i - s_j - q_i . x_i + s_i <= 0 for ordered pairs
    for i, x in enumerate(types):
        for j in range(n):
            if i == j:
                continue
            row = zero_row()
            alloc_coeffs(j, x, row)
            alloc_coeffs(i, tuple(-c for c in x), row)
            row[svar(j)] -= num(1)
            row[svar(i)] += num(1)
            a_ub.append(row)
            b_ub.append(num(0))
    if mono_mode == "payment":
        for i, xi in enumerate(types):
            for j, xj in enumerate(types):
                if i != j and xi != xj and vec_leq(xi, xj, tol=0):
                    row = zero_row()
                    row[svar(i)] += num(1)
                    row[svar(j)] -= num(1)
                    a_ub.append(row)
                    b_ub.append(num(0))
    elif mono_mode == "allocation":
        for i, xi in enumerate(types):
            for j, xj in enumerate(types):
                if i != j and xi != xj and vec_leq(xi, xj, tol=0):
                    for l in range(k):
                        row = zero_row()
                        unit = tuple(num(1) if c == l else num(0) for c in range(k))
                        alloc_coeffs(i, unit, row)
                        alloc_coeffs(j, tuple(-c for c in unit), row)
                        a_ub.append(row)
                        b_ub.append(num(0))

    c_obj = zero_row()
    for i, w in enumerate(weights):
        c_obj[svar(i)] = w

    def read_solution(x_opt):
        out = []
        for i in range(n):
            if use_hull:
                q = list(zero_vec(k))
                for j, v in enumerate(verts):
                    w = x_opt[avar(i, j)]
                    if w != 0:
                        for l in range(k):
                            q[l] += w * v[l]
                q = tuple(q)
            else:
                q = tuple(x_opt[avar(i, j)] for j in range(k))
            out.append((q, x_opt[svar(i)]))
        return out

    lex = [
        [num(1) if v == svar(i) else num(0) for v in range(nvars)] for i in range(n)
    ]
    return c_obj, a_ub, b_ub, a_eq, b_eq, lex, read_solution


def solve_rev(
    gamma: AllocationSet,
    X: DiscreteValuation,
    lex_refine: bool = True,
    mono_mode: str | None = None,
) -> SolveResult:
    """Optimal revenue over all mechanisms for a polytope allocation set.

    Returns the optimum together with the witness menu read off the program;
    the witness is the revenue-maximizing mechanism itself.
    """
    if gamma.is_finite:
        raise ValueError(
            "solve_rev needs a polytope allocation set; use solve_deterministic "
            "for finite sets (or take the convex hull for an upper bound)"
        )
    if gamma.dim != X.dim:
        raise ValueError("allocation set and distribution dimensions differ")
    types, weights = _with_origin(X)
    c_obj, a_ub, b_ub, a_eq, b_eq, lex, read = _build_rev_lp(
        gamma, types, weights, mono_mode=mono_mode
    )
    res = lp.solve_lp(
        c_obj, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq,
        lex_objectives=lex if lex_refine else (),
    )
    if res.status != lp.OPTIMAL:
        raise RuntimeError(
            f"revenue LP reported {res.status}; the program is always feasible "
            "and bounded, so this signals a solver bug"
        )
    assignment = read(res.x)
    value = sum(w * s for w, (_, s) in zip(weights, assignment))
    table = TabularMechanism(tuple((x, q, s) for x, (q, s) in zip(types, assignment)))
    wit = mechanism(assignment, gamma, validate=False)

    cert_gap = lp.dual_certificate_gap(c_obj, a_ub, b_ub, a_eq, b_eq, res)
    t = tolerance()
    certified = (
        cert_gap <= t
        and verify_ic(table, types).passed
        and verify_ir(table, types).passed
        and all(s >= -t for _, s in assignment)
        and abs(revenue(wit, X) - value) <= t
    )
    label = REV
    if mono_mode == "payment":
        label = MONREV_UB
    elif mono_mode == "allocation":
        label = AMONREV_UB
    if mono_mode is not None:
        grid = default_verification_grid(X)
        verifier = (
            verify_monotone_payment if mono_mode == "payment" else verify_monotone_allocation
        )
        certified = certified and verifier(wit, grid).passed
    diagnostics = {
        "numeric_mode": get_mode(),
        "lp_iterations": res.iterations,
        "lp_rows": len(a_ub) + len(a_eq),
        "lp_cols": len(c_obj),
        "dual_certificate_gap": cert_gap,
        "types": len(types),
    }
    return SolveResult(value, wit, label, certified, diagnostics)


# ---------------------------------------------------------------------------
# deterministic solver over a finite allocation set
# ---------------------------------------------------------------------------


def _max_payments(types, dots, assign, mono_pairs=()):
    """Pointwise-maximal payments under IC difference constraints.

    ``dots[v][i]`` is allocation v valued by type i.  Returns None when the
    system (with nonnegative payments) is infeasible.  Bellman-Ford style
    relaxation: dist[i] starts at the IR cap and is relaxed along IC arcs
    s_i <= s_j + (a_i - a_j) . x_i and any extra ordering arcs (i, j)
    meaning s_i <= s_j.
    """
    n = len(types)
    dist = [dots[assign[i]][i] for i in range(n)]
    edges = [
        (i, j, dots[assign[i]][i] - dots[assign[j]][i])
        for i in range(n)
        for j in range(n)
        if i != j
    ]
    edges.extend((i, j, num(0)) for i, j in mono_pairs)
    for it in range(n + 1):
        changed = False
        for i, j, w in edges:
            cand = dist[j] + w
            if cand < dist[i]:
                dist[i] = cand
                changed = True
        if not changed:
            break
    else:
        return None  # still relaxing after n+1 passes: negative cycle
    if any(d < 0 for d in dist):
        return None  # no nonnegative payment vector exists
    return dist


def solve_deterministic(
    gamma: AllocationSet,
    X: DiscreteValuation,
    cap: int = DEFAULT_ENUM_CAP,
    mono_mode: str | None = None,
) -> SolveResult:
    """Optimal revenue over menus drawn from a finite allocation set."""
    if not gamma.is_finite:
        raise ValueError("solve_deterministic needs a finite allocation set")
    if gamma.dim != X.dim:
        raise ValueError("allocation set and distribution dimensions differ")
    alloc = list(gamma.points())
    origin = zero_vec(gamma.dim)
    types = list(X.support)
    weights = list(X.probs)
    has_zero_alloc = origin in alloc
    phantom = origin not in types
    if phantom:
        types.append(origin)
        weights.append(num(0))
    n = len(types)
    # with the all-zero allocation available, the origin type can always take
    # (0, 0), which adds no constraints beyond IR and nonnegative payments
    free_slots = [i for i in range(n) if not (phantom and i == n - 1 and has_zero_alloc)]
    fixed = {} if not (phantom and has_zero_alloc) else {n - 1: alloc.index(origin)}
    needed = len(alloc) ** len(free_slots)
    if needed > cap:
        raise CapExceededError(
            needed, cap,
            hint="reduce the support or solve over the convex hull for an upper bound",
        )
    dots = [[dot(a, x) for x in types] for a in alloc]
    mono_pairs = []
    if mono_mode == "payment":
        mono_pairs = [
            (i, j)
            for i in range(n)
            for j in range(n)
            if i != j and types[i] != types[j] and vec_leq(types[i], types[j], tol=0)
        ]
    comparable = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and types[i] != types[j] and vec_leq(types[i], types[j], tol=0)
    ]

    best = None  # (value, assignment tuple, payments)
    for combo in itertools.product(range(len(alloc)), repeat=len(free_slots)):
        assign = list(combo)
        for pos, ai in sorted(fixed.items()):
            assign.insert(pos, ai)
        # cheap IR-cap upper bound before solving the payment system
        ub = sum(w * dots[assign[i]][i] for i, w in enumerate(weights) if w != 0)
        if best is not None and ub <= best[0]:
            continue
        if mono_mode == "allocation" and any(
            not vec_leq(alloc[assign[i]], alloc[assign[j]], tol=0) for i, j in comparable
        ):
            continue
        pay = _max_payments(types, dots, assign, mono_pairs)
        if pay is None:
            continue
        value = sum(w * s for w, s in zip(weights, pay))
        key = tuple(assign)
        if best is None or value > best[0] or (value == best[0] and key < best[1]):
            best = (value, key, pay)
    if best is None:
        raise RuntimeError(
            "no feasible deterministic assignment; signals a solver bug since "
            "a constant allocation with zero payments is always feasible"
        )
    value, assign, pay = best
    items = [(alloc[a], s) for a, s in zip(assign, pay)]
    wit = mechanism(items, gamma, validate=False)
    table = TabularMechanism(tuple((x, alloc[a], s) for x, a, s in zip(types, assign, pay)))
    t = tolerance()
    certified = (
        verify_ic(table, types).passed
        and verify_ir(table, types).passed
        and all(s >= -t for s in pay)
        and abs(revenue(wit, X) - value) <= t
    )
    label = DREV
    if mono_mode == "payment":
        label = MONREV_UB
    elif mono_mode == "allocation":
        label = AMONREV_UB
    if mono_mode is not None:
        grid = default_verification_grid(X)
        verifier = (
            verify_monotone_payment if mono_mode == "payment" else verify_monotone_allocation
        )
        certified = certified and verifier(wit, grid).passed
    diagnostics = {
        "numeric_mode": get_mode(),
        "assignments_enumerated": needed,
        "types": n,
    }
    return SolveResult(value, wit, label, certified, diagnostics)


# ---------------------------------------------------------------------------
# price searches
# ---------------------------------------------------------------------------


def myerson_price(X: DiscreteValuation) -> tuple[Number, Number]:
    """Best fixed price for one good: maximize p * P[X >= p].

    Some optimal price is always a support point; ties go to the smallest
    price."""
    if X.dim != 1:
        raise ValueError("myerson_price is for one good")
    vals = sorted(((x[0], p) for x, p in zip(X.support, X.probs)), reverse=True)
    best_price = None
    best_rev = None
    tail = num(0)
    for v, p in vals:
        tail += p
        r = v * tail
        if best_rev is None or r > best_rev or (r == best_rev and v < best_price):
            best_rev = r
            best_price = v
    return best_price, best_rev


def srev(X: DiscreteValuation) -> Number:
    """Revenue of the best separate per-good fixed prices."""
    return sum(myerson_price(X.marginal(i))[1] for i in range(X.dim))


def brev(X: DiscreteValuation) -> Number:
    """Revenue of the best grand-bundle fixed price."""
    return myerson_price(X.bundle_total())[1]


def solve_monotone(gamma: AllocationSet, X: DiscreteValuation, mode: str,
                   cap: int = DEFAULT_ENUM_CAP) -> SolveResult:
    """Upper bound for the payment- or allocation-monotone revenue.

    Support-level ordering constraints are necessary for global monotonicity
    of the induced mechanism but possibly not sufficient; ``certified`` is
    True only when the witness passes grid verification.
    """
    if mode not in ("payment", "allocation"):
        raise ValueError("mode must be 'payment' or 'allocation'")
    if gamma.is_finite:
        return solve_deterministic(gamma, X, cap=cap, mono_mode=mode)
    return solve_rev(gamma, X, mono_mode=mode)
