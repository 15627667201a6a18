"""Max-affine convex functions and their subgradient structure.

A :class:`PWLConvex` is ``f(x) = max_i (g_i . x + c_i)`` over a finite list
of pieces.  Buyer payoff functions of finite menus have exactly this shape
(gradient = allocation, intercept = minus the payment), so this module is
where evaluation, subgradient sets, directional derivatives, membership in
the admissible payoff class, and supermodularity checks live.

A piece is *active* at ``x`` when its value reaches the max within the
active-set tolerance (exact comparison in rational mode).  Subgradient sets
are reported through their active gradients; the full set is the convex hull
of those.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import lp
from .allocation import AllocationSet
from .numeric import (
    Number,
    Vector,
    active_cutoff,
    dot,
    exact_mode,
    num,
    tolerance,
    vec,
    vjoin,
    vmeet,
    zero_vec,
)


@dataclass(frozen=True)
class PWLConvex:
    pieces: tuple  # tuple of (gradient vector, intercept)

    @property
    def dim(self) -> int:
        return len(self.pieces[0][0])


@dataclass(frozen=True)
class SubgradientSet:
    point: Vector
    active_gradients: tuple  # gradients of the pieces active at point


@dataclass(frozen=True)
class BGammaReport:
    passed: bool
    origin_ok: bool
    certificate_used: bool  # all piece gradients sit in the set
    failures: tuple  # probe points whose active hull misses the set

    def __bool__(self) -> bool:
        return self.passed


def pwl(pieces: Iterable[tuple]) -> PWLConvex:
    """Build a max-affine function; identical pieces are merged."""
    seen = set()
    out = []
    for g, c in pieces:
        p = (vec(g), num(c))
        if p not in seen:
            seen.add(p)
            out.append(p)
    if not out:
        raise ValueError("a max-affine function needs at least one piece")
    k = len(out[0][0])
    if any(len(g) != k for g, _ in out):
        raise ValueError("piece gradients must share one dimension")
    return PWLConvex(tuple(out))


def evaluate(f: PWLConvex, x: Sequence) -> Number:
    x = vec(x)
    return max(dot(g, x) + c for g, c in f.pieces)


def active_pieces(f: PWLConvex, x: Sequence) -> list:
    """Pieces whose value at x is within the active-set tolerance of the max."""
    x = vec(x)
    vals = [dot(g, x) + c for g, c in f.pieces]
    cutoff = active_cutoff(max(vals))
    return [f.pieces[i] for i, v in enumerate(vals) if v >= cutoff]


def subgradient_set(f: PWLConvex, x: Sequence) -> SubgradientSet:
    x = vec(x)
    grads = []
    seen = set()
    for g, _ in active_pieces(f, x):
        if g not in seen:
            seen.add(g)
            grads.append(g)
    return SubgradientSet(point=x, active_gradients=tuple(grads))


def dir_derivative(f: PWLConvex, x: Sequence, y: Sequence) -> Number:
    """One-sided directional derivative: max of g.y over active gradients."""
    y = vec(y)
    return max(dot(g, y) for g in subgradient_set(f, x).active_gradients)


def direction_maximal_subgradients(f: PWLConvex, x: Sequence, y: Sequence) -> SubgradientSet:
    """Active gradients additionally maximal in the direction y."""
    y = vec(y)
    sub = subgradient_set(f, x)
    vals = [dot(g, y) for g in sub.active_gradients]
    cutoff = active_cutoff(max(vals))
    grads = tuple(g for g, v in zip(sub.active_gradients, vals) if v >= cutoff)
    return SubgradientSet(point=sub.point, active_gradients=grads)


def is_differentiable(f: PWLConvex, x: Sequence) -> bool:
    return len(subgradient_set(f, x).active_gradients) == 1


def is_in_B_gamma(
    f: PWLConvex, gamma: AllocationSet, probe_points: Sequence[Sequence]
) -> BGammaReport:
    """Check membership in the admissible payoff class for the given set.

    Requires f(0)=0 and, at every probe point, a subgradient inside the set,
    i.e. the convex hull of the active gradients must intersect it.  If every
    piece gradient already lies in the set the probes are skipped: gradient
    membership on the differentiability set is a sufficient certificate.
    """
    if not probe_points:
        raise ValueError("need at least one probe point")
    t = tolerance()
    origin_ok = abs(evaluate(f, zero_vec(f.dim))) <= t
    if all(_in_gamma(gamma, g) for g, _ in f.pieces):
        return BGammaReport(passed=origin_ok, origin_ok=origin_ok,
                            certificate_used=True, failures=())
    failures = []
    for x in probe_points:
        grads = subgradient_set(f, x).active_gradients
        if not _hull_meets_gamma(grads, gamma):
            failures.append(vec(x))
    passed = origin_ok and not failures
    return BGammaReport(passed=passed, origin_ok=origin_ok,
                        certificate_used=False, failures=tuple(failures))


def check_supermodular(f: PWLConvex, grid: Sequence[Sequence]) -> tuple[bool, list]:
    """Test f(x v y) + f(x ^ y) >= f(x) + f(y) over all grid pairs.

    Comparable pairs hold with equality and are skipped.  Returns the
    violating pairs with their gaps.
    """
    if not grid:
        raise ValueError("need a nonempty grid")
    pts = [vec(x) for x in grid]
    vals = {x: evaluate(f, x) for x in set(pts)}
    t = tolerance()
    violations = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            x, y = pts[i], pts[j]
            join = vjoin(x, y)
            if join == x or join == y:
                continue
            meet = vmeet(x, y)
            for p in (join, meet):
                if p not in vals:
                    vals[p] = evaluate(f, p)
            gap = vals[join] + vals[meet] - vals[x] - vals[y]
            if gap < -t:
                violations.append((x, y, gap))
    return (not violations), violations


def coordinatewise_max_subgradient(f: PWLConvex, x: Sequence) -> Vector:
    """The componentwise maximum of the active gradients, when it is active.

    For supermodular max-affine functions this vector is itself an active
    gradient; if it is not, the function is not supermodular at x and an
    error is raised.
    """
    sub = subgradient_set(f, x)
    top = sub.active_gradients[0]
    for g in sub.active_gradients[1:]:
        top = vjoin(top, g)
    if top not in sub.active_gradients:
        raise ValueError(
            f"no coordinatewise-maximal active gradient at {sub.point}: "
            f"componentwise max {top} is not active"
        )
    return top


def prune_dominated(f: PWLConvex, lo: Sequence, hi: Sequence) -> PWLConvex:
    """Drop pieces strictly below another piece everywhere on the given box.

    Pairwise test; the maximum of the affine difference over a box is a
    closed-form corner sum, so no LP is needed.
    """
    lo = vec(lo)
    hi = vec(hi)
    t = tolerance()
    keep = []
    for i, (gi, ci) in enumerate(f.pieces):
        dominated = False
        for j, (gj, cj) in enumerate(f.pieces):
            if i == j:
                continue
            best = ci - cj
            for d, a, b in zip((p - q for p, q in zip(gi, gj)), lo, hi):
                best += d * b if d > 0 else d * a
            if best < -t:
                dominated = True
                break
        if not dominated:
            keep.append((gi, ci))
    return PWLConvex(tuple(keep))


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _in_gamma(gamma: AllocationSet, g: Vector) -> bool:
    from .allocation import contains

    return contains(gamma, g)


def _hull_meets_gamma(grads: Sequence[Vector], gamma: AllocationSet) -> bool:
    """Does the convex hull of ``grads`` intersect the allocation set?"""
    if any(_in_gamma(gamma, g) for g in grads):
        return True
    m = len(grads)
    k = gamma.dim
    if gamma.is_finite:
        from .allocation import hull_distance_l1

        t = tolerance()
        return any(hull_distance_l1(grads, p) <= t * (1 + k) for p in gamma.vertices)
    # polytope: weights lambda over grads, point z in the set, hull point = z
    if gamma.halfspaces is not None:
        nh = len(gamma.halfspaces)
        # vars: lambda (m), z (k); constraints: sum lambda = 1,
        # sum lambda g - z = 0, halfspaces on z
        a_eq = [[num(1)] * m + [num(0)] * k]
        b_eq = [num(1)]
        for i in range(k):
            row = [g[i] for g in grads] + [num(-1) if j == i else num(0) for j in range(k)]
            a_eq.append(row)
            b_eq.append(num(0))
        a_ub = [[num(0)] * m + list(n) for n, _ in gamma.halfspaces]
        b_ub = [b for _, b in gamma.halfspaces]
        res = lp.solve_lp([num(0)] * (m + k), a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
        return res.status == lp.OPTIMAL
    # vertices only: hull(grads) meets hull(vertices)
    verts = gamma.vertices
    mv = len(verts)
    a_eq = [[num(1)] * m + [num(0)] * mv]
    b_eq = [num(1)]
    a_eq.append([num(0)] * m + [num(1)] * mv)
    b_eq.append(num(1))
    for i in range(k):
        row = [g[i] for g in grads] + [-v[i] for v in verts]
        a_eq.append(row)
        b_eq.append(num(0))
    res = lp.solve_lp([num(0)] * (m + mv), a_eq=a_eq, b_eq=b_eq)
    return res.status == lp.OPTIMAL
