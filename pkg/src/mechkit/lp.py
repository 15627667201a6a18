"""Internal dense simplex solver.

Solves  max c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

The implementation is a textbook two-phase tableau simplex kept deliberately
small: problem sizes in this toolkit are at most a few dozen variables and a
couple hundred rows.  In exact mode all arithmetic is over
``fractions.Fraction`` and the pivot rule is Bland's (guaranteed
termination); in float mode a tableau steepest-edge heuristic is used with a
Bland fallback against cycling.

Extras needed by the callers:

* ``lex_objectives`` - after the primary objective is optimal, further
  objectives are maximized over the optimal face (nonbasic columns whose
  reduced cost would degrade an earlier objective are frozen).  Used for
  deterministic tie-breaking.
* dual values - one multiplier per input row, read from the reduced costs of
  the identity columns; ``dual_certificate_gap`` checks them independently.
* ``solve_lp_via_dual`` - solves many-row/few-column instances through the
  dual so that phase 1 stays tiny.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .numeric import Number, exact_mode, num

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple | None = None
    value: Number | None = None
    dual: tuple | None = None  # one entry per row: first ub rows, then eq rows
    iterations: int = 0


class _Tableau:
    def __init__(self, n_struct, rows, rhs, slack_sign, eq_flags):
        # rows: list of structural coefficient lists, rhs >= 0 already ensured
        self.n = n_struct
        self.m = len(rows)
        self.slack_sign = slack_sign  # +1, -1 (flipped ub) or 0 (eq) per row
        self.eq_flags = eq_flags
        self.iterations = 0
        eps = 0.0 if exact_mode() else 1e-11

        # column layout: structural | slacks (one per ub row) | artificials
        self.slack_col = {}
        col = n_struct
        for i in range(self.m):
            if slack_sign[i] != 0:
                self.slack_col[i] = col
                col += 1
        self.art_col = {}
        self.basis = []
        for i in range(self.m):
            if slack_sign[i] == 1:
                self.basis.append(self.slack_col[i])
            else:
                self.art_col[i] = col
                self.basis.append(col)
                col += 1
        self.ncols = col
        self.art_cols = set(self.art_col.values())
        self.forbidden = set()
        self.eps = eps

        self.T = []
        for i in range(self.m):
            row = [num(0)] * self.ncols
            for j, a in enumerate(rows[i]):
                if a != 0:
                    row[j] = a
            if i in self.slack_col:
                row[self.slack_col[i]] = num(slack_sign[i])
            if i in self.art_col:
                row[self.art_col[i]] = num(1)
            self.T.append(row)
        self.rhs = list(rhs)

    # -- pivoting ----------------------------------------------------------

    def _objective_row(self, costs):
        """Reduced-cost row z - c for maximizing ``costs`` (len ncols)."""
        row = [-c for c in costs]
        val = num(0)
        for i, b in enumerate(self.basis):
            cb = costs[b]
            if cb != 0:
                t_row = self.T[i]
                for j in range(self.ncols):
                    if t_row[j] != 0:
                        row[j] += cb * t_row[j]
                val += cb * self.rhs[i]
        return row, val

    def _pivot(self, r, c):
        piv = self.T[r][c]
        if piv != 1:
            inv = 1 / piv if exact_mode() else 1.0 / piv
            self.T[r] = [a * inv for a in self.T[r]]
            self.rhs[r] = self.rhs[r] * inv
        prow = self.T[r]
        prhs = self.rhs[r]
        for i in range(self.m):
            if i == r:
                continue
            f = self.T[i][c]
            if f != 0:
                row = self.T[i]
                for j in range(self.ncols):
                    if prow[j] != 0:
                        row[j] -= f * prow[j]
                row[c] = num(0)
                self.rhs[i] -= f * prhs
        self.basis[r] = c
        self.iterations += 1

    def _entering(self, obj, bland):
        eps = self.eps
        best = None
        best_score = None
        for j in range(self.ncols):
            if j in self.forbidden or j in self.art_cols:
                continue
            rc = obj[j]
            if rc < -eps:
                if bland:
                    return j
                # steepest-edge flavored: scale by the column norm
                colsq = 1.0
                for i in range(self.m):
                    a = self.T[i][j]
                    if a != 0:
                        colsq += float(a) * float(a)
                score = float(rc) / (colsq ** 0.5)
                if best_score is None or score < best_score:
                    best_score = score
                    best = j
        return best

    def _leaving(self, c):
        eps = self.eps
        best = None
        best_ratio = None
        for i in range(self.m):
            a = self.T[i][c]
            if a > eps:
                ratio = self.rhs[i] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[best])
                ):
                    best_ratio = ratio
                    best = i
        return best

    def maximize(self, costs):
        """Run simplex for the given cost vector; returns status."""
        obj, _ = self._objective_row(costs)
        exact = exact_mode()
        limit = 200 * (self.m + self.ncols + 10)
        bland_after = 4 * (self.m + self.ncols + 10)
        start = self.iterations
        while True:
            steps = self.iterations - start
            if steps > limit:
                raise RuntimeError("simplex iteration limit exceeded (solver bug)")
            bland = exact or steps > bland_after
            c = self._entering(obj, bland)
            if c is None:
                return OPTIMAL
            r = self._leaving(c)
            if r is None:
                return UNBOUNDED
            self._pivot(r, c)
            # update objective row in place
            f = obj[c]
            prow = self.T[r]
            for j in range(self.ncols):
                if prow[j] != 0:
                    obj[j] -= f * prow[j]
            obj[c] = num(0)

    def freeze_optimal_face(self, costs):
        """Forbid nonbasic columns whose reduced cost is nonzero."""
        obj, _ = self._objective_row(costs)
        eps = self.eps if not exact_mode() else 0
        in_basis = set(self.basis)
        for j in range(self.ncols):
            if j in in_basis or j in self.art_cols:
                continue
            if abs(obj[j]) > eps:
                self.forbidden.add(j)

    # -- solution reading --------------------------------------------------

    def solution(self):
        x = [num(0)] * self.n
        for i, b in enumerate(self.basis):
            if b < self.n:
                x[b] = self.rhs[i]
        return tuple(x)

    def duals(self, costs, flipped):
        """Multipliers for the original rows (ub rows first, then eq).

        For ub rows the slack column absorbs any row flip, so its reduced
        cost is the original-orientation multiplier directly; flipped eq
        rows read the artificial column and need a sign change.
        """
        obj, _ = self._objective_row(costs)
        out = []
        for i in range(self.m):
            if self.slack_sign[i] != 0:
                y = obj[self.slack_col[i]]
            else:
                y = obj[self.art_col[i]]
                if flipped[i]:
                    y = -y
            out.append(y)
        return tuple(out)


def solve_lp(
    c: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    lex_objectives: Sequence[Sequence] = (),
) -> LPResult:
    """Maximize ``c.x`` over ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    c = [num(v) for v in c]
    n = len(c)
    rows = []
    rhs = []
    slack_sign = []
    eq_flags = []
    flipped = []
    for a, b in zip(a_ub, b_ub, strict=True):
        a = [num(v) for v in a]
        b = num(b)
        if b < 0:
            rows.append([-v for v in a])
            rhs.append(-b)
            slack_sign.append(-1)
            flipped.append(True)
        else:
            rows.append(a)
            rhs.append(b)
            slack_sign.append(1)
            flipped.append(False)
        eq_flags.append(False)
    for a, b in zip(a_eq, b_eq, strict=True):
        a = [num(v) for v in a]
        b = num(b)
        if b < 0:
            rows.append([-v for v in a])
            rhs.append(-b)
            flipped.append(True)
        else:
            rows.append(a)
            rhs.append(b)
            flipped.append(False)
        slack_sign.append(0)
        eq_flags.append(True)

    tab = _Tableau(n, rows, rhs, slack_sign, eq_flags)

    feas_tol = 0 if exact_mode() else 1e-7
    if tab.art_cols:
        phase1 = [num(0)] * tab.ncols
        for j in tab.art_cols:
            phase1[j] = num(-1)
        status = tab.maximize(phase1)
        _, val = tab._objective_row(phase1)
        if status != OPTIMAL or -val > feas_tol:
            return LPResult(INFEASIBLE, iterations=tab.iterations)
        # drive artificials out of the basis where possible
        for i in range(tab.m):
            if tab.basis[i] in tab.art_cols:
                for j in range(tab.ncols):
                    if j in tab.art_cols or j in tab.forbidden:
                        continue
                    if tab.T[i][j] != 0:
                        tab._pivot(i, j)
                        break

    full_c = list(c) + [num(0)] * (tab.ncols - n)
    status = tab.maximize(full_c)
    if status != OPTIMAL:
        return LPResult(UNBOUNDED, iterations=tab.iterations)

    for extra in lex_objectives:
        tab.freeze_optimal_face(full_c)
        full_c = [num(v) for v in extra] + [num(0)] * (tab.ncols - n)
        status = tab.maximize(full_c)
        if status != OPTIMAL:
            return LPResult(UNBOUNDED, iterations=tab.iterations)

    x = tab.solution()
    value = sum(ci * xi for ci, xi in zip(c, x))
    primary = list(c) + [num(0)] * (tab.ncols - n)
    dual = tab.duals(primary, flipped)
    return LPResult(OPTIMAL, x=x, value=value, dual=dual, iterations=tab.iterations)


def solve_lp_via_dual(c: Sequence, a_ub: Sequence[Sequence], b_ub: Sequence) -> LPResult:
    """Maximize ``c.x`` over ``A x <= b``, ``x >= 0`` through the dual LP.

    Useful when there are many rows and few columns: phase 1 of the dual has
    at most ``len(c)`` artificials.  Assumes the primal is bounded whenever it
    is feasible (true for the compact feasible sets used here), so a dual
    infeasibility is reported as primal infeasibility.
    """
    c = [num(v) for v in c]
    b = [num(v) for v in b_ub]
    m = len(b)
    n = len(c)
    dual_c = [-v for v in b]
    dual_rows = [[-num(a_ub[i][j]) for i in range(m)] for j in range(n)]
    dual_rhs = [-v for v in c]
    res = solve_lp(dual_c, dual_rows, dual_rhs)
    if res.status == UNBOUNDED:
        return LPResult(INFEASIBLE, iterations=res.iterations)
    if res.status == INFEASIBLE:
        return LPResult(INFEASIBLE, iterations=res.iterations)
    x = res.dual
    value = -res.value
    return LPResult(OPTIMAL, x=x, value=value, dual=res.x, iterations=res.iterations)


def dual_certificate_gap(c, a_ub, b_ub, a_eq, b_eq, result: LPResult) -> Number:
    """Worst violation of the dual optimality certificate (0 = certified).

    Checks dual feasibility (multipliers of ub rows nonnegative, reduced costs
    of all primal variables nonpositive) and strong duality
    ``b.y == c.x``; returns the largest violation found.
    """
    if result.status != OPTIMAL or result.dual is None:
        raise ValueError("certificate requires an optimal result with duals")
    y = result.dual
    n_ub = len(b_ub)
    gap = num(0)
    for i in range(n_ub):
        gap = max(gap, -y[i])
    n = len(c)
    for j in range(n):
        reduced = num(c[j])
        for i in range(n_ub):
            reduced -= y[i] * num(a_ub[i][j])
        for i in range(len(b_eq)):
            reduced -= y[n_ub + i] * num(a_eq[i][j])
        gap = max(gap, reduced)
    by = sum(y[i] * num(b_ub[i]) for i in range(n_ub))
    by += sum(y[n_ub + i] * num(b_eq[i]) for i in range(len(b_eq)))
    gap = max(gap, abs(by - result.value))
    return gap
