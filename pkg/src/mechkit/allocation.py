"""Compact allocation sets in the nonnegative orthant.

An :class:`AllocationSet` is either a finite set of points or a bounded
polytope, always contained in ``R_+^k``.  Polytopes may carry a
V-representation (vertices), an H-representation (halfspaces
``normal . g <= offset``), or both; conversion from H to V is done on demand
for ``k <= 4`` only, since hull conversion is exponential and not the point
of this toolkit.  Larger dimensions must supply the representations they
need.

The cached norm bound (``gamma_sq`` = max squared Euclidean norm, attained at
a vertex) is the Lipschitz constant driving every payoff-function bound
downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import lp
from .numeric import (
    Number,
    Vector,
    dot,
    exact_mode,
    norm_sq,
    num,
    tolerance,
    vec,
    zero_vec,
)

STANDARD_KINDS = (
    "cube",
    "cube_vertices",
    "unit_demand",
    "unit_demand_det",
    "simplex_eq",
    "simplex_vertices",
    "bundle_pair",
)

_VERTEX_GEN_CAP = 4096


@dataclass(frozen=True)
class AllocationSet:
    """A compact allocation set: finite point set or bounded polytope."""

    dim: int
    kind: str  # "finite" | "polytope"
    vertices: tuple | None
    halfspaces: tuple | None  # tuple of (normal vector, offset)
    gamma_sq: Number
    label: str = "custom"

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def points(self) -> tuple:
        """The explicit point list (vertices); always available."""
        if self.vertices is None:
            raise ValueError("allocation set has no vertex representation")
        return self.vertices


def valuation(coords: Iterable, dim: int | None = None) -> Vector:
    """Normalize a buyer type into the active numeric mode.

    Valuations live in R_+^k but extended evaluation points may be any finite
    real vector, so only finiteness and (optionally) the dimension are
    enforced here.
    """
    v = vec(coords)
    if dim is not None and len(v) != dim:
        raise ValueError(f"expected a {dim}-vector, got {len(v)} coordinates")
    return v


def finite_set(points: Iterable[Iterable]) -> AllocationSet:
    pts = _dedupe(vec(p) for p in points)
    if not pts:
        raise ValueError("a finite allocation set needs at least one point")
    k = len(pts[0])
    for p in pts:
        if len(p) != k:
            raise ValueError("allocation points must share one dimension")
        if any(c < 0 for c in p):
            raise ValueError(f"allocation {p} has a negative coordinate")
    return AllocationSet(
        dim=k,
        kind="finite",
        vertices=tuple(pts),
        halfspaces=None,
        gamma_sq=max(norm_sq(p) for p in pts),
        label="finite",
    )


def polytope(
    vertices: Iterable[Iterable] | None = None,
    halfspaces: Iterable[tuple] | None = None,
    dim: int | None = None,
    label: str = "polytope",
) -> AllocationSet:
    """Build a bounded polytope from vertices and/or halfspaces.

    Nonnegativity halfspaces are appended automatically when an
    H-representation is given, since allocation sets live in R_+^k.
    """
    verts = None
    if vertices is not None:
        verts = _dedupe(vec(p) for p in vertices)
        if not verts:
            raise ValueError("empty vertex list")
        k = len(verts[0])
        for p in verts:
            if len(p) != k:
                raise ValueError("vertices must share one dimension")
            if any(c < 0 for c in p):
                raise ValueError(f"vertex {p} has a negative coordinate")
        dim = k
    hs = None
    if halfspaces is not None:
        raw = [(vec(n), num(b)) for n, b in halfspaces]
        if dim is None:
            if not raw:
                raise ValueError("cannot infer dimension from empty halfspace list")
            dim = len(raw[0][0])
        for n, _ in raw:
            if len(n) != dim:
                raise ValueError("halfspace normals must share one dimension")
        have = set(raw)
        hs = tuple(raw) + tuple(
            h for h in _nonneg_halfspaces(dim) if h not in have
        )
    if verts is None and hs is None:
        raise ValueError("a polytope needs vertices or halfspaces")

    if verts is not None and hs is not None:
        t = tolerance()
        for p in verts:
            for n, b in hs:
                if dot(n, p) > b + t * (1 + abs(b)):
                    raise ValueError(f"vertex {p} violates halfspace {n} . g <= {b}")
    if verts is None:
        if dim > 4:
            raise ValueError(
                "H-to-V conversion is only done for k <= 4; supply vertices"
            )
        verts = _vertices_from_halfspaces(hs, dim)
        if not verts:
            raise ValueError("halfspace system has no feasible point (empty polytope)")
    return AllocationSet(
        dim=dim,
        kind="polytope",
        vertices=tuple(verts),
        halfspaces=hs,
        gamma_sq=max(norm_sq(p) for p in verts),
        label=label,
    )


def make_standard(kind: str, k: int) -> AllocationSet:
    """One of the standard allocation-set families.

    cube            [0,1]^k                      randomized additive sale
    cube_vertices   {0,1}^k                      deterministic additive sale
    unit_demand     {g in [0,1]^k : sum g <= 1}  randomized unit demand
    unit_demand_det {0, e1, ..., ek}             deterministic unit demand
    simplex_eq      {g in [0,1]^k : sum g = 1}   randomized choice of k options
    simplex_vertices{e1, ..., ek}                deterministic choice
    bundle_pair     {all-zero, all-one}          grand bundle only
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"dimension must be a positive integer, got {k!r}")
    if kind not in STANDARD_KINDS:
        raise ValueError(f"unknown standard kind {kind!r}; expected one of {STANDARD_KINDS}")
    o = num(0)
    l = num(1)
    ones = tuple(l for _ in range(k))
    zeros = zero_vec(k)

    def unit(i):
        return tuple(l if j == i else o for j in range(k))

    if kind == "cube":
        hs = tuple((unit(i), l) for i in range(k)) + _nonneg_halfspaces(k)
        verts = _binary_vertices(k) if 2**k <= _VERTEX_GEN_CAP else None
        return AllocationSet(k, "polytope", verts, hs, gamma_sq=num(k), label=kind)
    if kind == "cube_vertices":
        if 2**k > _VERTEX_GEN_CAP:
            raise ValueError(f"cube_vertices with k={k} has too many points to enumerate")
        return AllocationSet(
            k, "finite", _binary_vertices(k), None, gamma_sq=num(k), label=kind
        )
    if kind == "unit_demand":
        hs = ((ones, l),) + _nonneg_halfspaces(k)
        verts = (zeros,) + tuple(unit(i) for i in range(k))
        return AllocationSet(k, "polytope", verts, hs, gamma_sq=l, label=kind)
    if kind == "unit_demand_det":
        verts = (zeros,) + tuple(unit(i) for i in range(k))
        return AllocationSet(k, "finite", verts, None, gamma_sq=l, label=kind)
    if kind == "simplex_eq":
        hs = ((ones, l), (tuple(-c for c in ones), -l)) + _nonneg_halfspaces(k)
        verts = tuple(unit(i) for i in range(k))
        return AllocationSet(k, "polytope", verts, hs, gamma_sq=l, label=kind)
    if kind == "simplex_vertices":
        verts = tuple(unit(i) for i in range(k))
        return AllocationSet(k, "finite", verts, None, gamma_sq=l, label=kind)
    # bundle_pair
    return AllocationSet(k, "finite", (zeros, ones), None, gamma_sq=num(k), label=kind)


def gamma_norm(gamma: AllocationSet) -> float:
    """Norm bound: max Euclidean norm over the set (attained at a vertex)."""
    return float(gamma.gamma_sq) ** 0.5


def support_max(gamma: AllocationSet, y: Sequence) -> tuple[Number, Vector]:
    """max of g.y over the set, with an attaining vertex.

    Ties are broken toward the lexicographically largest witness so that all
    downstream outputs are reproducible.
    """
    y = vec(y)
    if len(y) != gamma.dim:
        raise ValueError("direction dimension mismatch")
    if gamma.vertices is not None:
        best_val = None
        best = None
        for p in gamma.vertices:
            v = dot(p, y)
            if best_val is None or v > best_val or (v == best_val and p > best):
                best_val = v
                best = p
        return best_val, best
    # H-representation only: lexicographic LP
    a_rows = [list(n) for n, _ in gamma.halfspaces]
    b_rows = [b for _, b in gamma.halfspaces]
    k = gamma.dim
    lex = [[num(1) if j == i else num(0) for j in range(k)] for i in range(k)]
    res = lp.solve_lp(list(y), a_ub=a_rows, b_ub=b_rows, lex_objectives=lex)
    if res.status != lp.OPTIMAL:
        raise RuntimeError(f"support LP returned {res.status} (set not compact?)")
    return dot(res.x, y), tuple(res.x)


def contains(gamma: AllocationSet, g: Sequence, tol: Number | None = None) -> bool:
    """Membership test: is g within Euclidean distance tol of the set?

    Exact when tol=0 in rational mode.  For polytopes the H-representation is
    checked facet by facet (with slack scaled by the facet normal); with only
    vertices available, a small LP measures the L1 deviation from the convex
    hull.
    """
    if tol is None:
        tol = tolerance()
    g = vec(g)
    if len(g) != gamma.dim:
        raise ValueError("point dimension mismatch")
    if gamma.is_finite:
        if tol == 0:
            return g in gamma.vertices
        tol_sq = tol * tol
        return any(norm_sq(tuple(a - b for a, b in zip(g, p))) <= tol_sq for p in gamma.vertices)
    if gamma.halfspaces is not None:
        for n, b in gamma.halfspaces:
            if tol == 0:
                if dot(n, g) > b:
                    return False
            elif float(dot(n, g)) > float(b) + float(tol) * float(norm_sq(n)) ** 0.5:
                return False
        return True
    return hull_distance_l1(gamma.vertices, g) <= tol * (1 + gamma.dim)


def hull_distance_l1(points: Sequence[Vector], g: Vector) -> Number:
    """Minimal L1 distance from g to the convex hull of the given points."""
    m = len(points)
    k = len(g)
    # vars: weights (m), dev+ (k), dev- (k); min sum dev  <=>  max -sum dev
    c = [num(0)] * m + [num(-1)] * (2 * k)
    a_eq = []
    b_eq = []
    for i in range(k):
        row = [p[i] for p in points]
        row += [num(1) if j == i else num(0) for j in range(k)]
        row += [num(-1) if j == i else num(0) for j in range(k)]
        a_eq.append(row)
        b_eq.append(g[i])
    a_eq.append([num(1)] * m + [num(0)] * (2 * k))
    b_eq.append(num(1))
    res = lp.solve_lp(c, a_eq=a_eq, b_eq=b_eq)
    if res.status != lp.OPTIMAL:
        raise RuntimeError(f"hull-distance LP returned {res.status}")
    return -res.value


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _dedupe(points) -> list:
    seen = set()
    out = []
    for p in points:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _nonneg_halfspaces(k: int) -> tuple:
    o = num(0)
    rows = []
    for i in range(k):
        n = tuple(num(-1) if j == i else o for j in range(k))
        rows.append((n, o))
    return tuple(rows)


def _binary_vertices(k: int) -> tuple:
    o = num(0)
    l = num(1)
    return tuple(
        tuple(l if bit else o for bit in bits)
        for bits in itertools.product((0, 1), repeat=k)
    )


def _solve_square(rows, rhs):
    """Gaussian elimination for a k x k system; None if singular."""
    k = len(rhs)
    m = [list(rows[i]) + [rhs[i]] for i in range(k)]
    eps = 0 if exact_mode() else 1e-12
    for col in range(k):
        piv = None
        best = eps
        for r in range(col, k):
            if abs(m[r][col]) > best:
                best = abs(m[r][col])
                piv = r
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pval = m[col][col]
        m[col] = [a / pval for a in m[col]]
        for r in range(k):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[i][k] for i in range(k))


def _vertices_from_halfspaces(hs, k: int) -> list:
    """Vertex enumeration by intersecting k-subsets of facets (k <= 4 only)."""
    # boundedness: over the appended g >= 0 rows it suffices that the
    # coordinate sum is bounded above
    res = lp.solve_lp([num(1)] * k, a_ub=[list(n) for n, _ in hs], b_ub=[b for _, b in hs])
    if res.status == lp.UNBOUNDED:
        raise ValueError("halfspace system describes an unbounded set")
    if res.status == lp.INFEASIBLE:
        return []
    t = tolerance()
    verts = []
    seen = set()
    for subset in itertools.combinations(range(len(hs)), k):
        rows = [hs[i][0] for i in subset]
        rhs = [hs[i][1] for i in subset]
        x = _solve_square(rows, rhs)
        if x is None:
            continue
        if any(dot(n, x) > b + t * (1 + abs(b)) for n, b in hs):
            continue
        key = x if exact_mode() else tuple(round(float(c), 9) for c in x)
        if key not in seen:
            seen.add(key)
            verts.append(x)
    return verts
