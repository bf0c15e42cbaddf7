"""Two-phase primal simplex with Bland's rule, plus the l1-minimization front end.

The solver works on the standard form min c.x s.t. Ax = b, x >= 0 with a dense
explicit basis inverse that is recomputed from scratch every 50 pivots.
General bounds are reduced to standard form up front, so no non-finite values
ever enter the pivoting arithmetic: a bound whose magnitude is at least
INF_BOUND (1e300) is treated as absent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .linalg import as_matrix

INF_BOUND = 1e300
FEAS_TOL = 1e-9
_ITER_CAP = 50_000
_REFRESH = 50


@dataclass(frozen=True)
class LpProblem:
    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray

    def validate(self) -> None:
        c = np.asarray(self.objective, dtype=np.float64)
        a = np.asarray(self.eq_matrix, dtype=np.float64)
        b = np.asarray(self.eq_rhs, dtype=np.float64)
        lo = np.asarray(self.lower_bounds, dtype=np.float64)
        hi = np.asarray(self.upper_bounds, dtype=np.float64)
        if a.ndim != 2:
            raise DomainError("eq_matrix must be 2-D")
        if c.shape != (a.shape[1],) or b.shape != (a.shape[0],):
            raise DomainError("inconsistent LP dimensions")
        if lo.shape != c.shape or hi.shape != c.shape:
            raise DomainError("bound vectors must match objective length")
        if np.any(lo > hi):
            raise DomainError("lower bound exceeds upper bound")


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    value: float
    point: np.ndarray


def _is_neg_inf(x: float) -> bool:
    return x <= -INF_BOUND


def _is_pos_inf(x: float) -> bool:
    return x >= INF_BOUND


def _refactor(a: np.ndarray, basis: list) -> np.ndarray:
    try:
        return np.linalg.solve(a[:, basis], np.eye(a.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular basis during refactorization: {exc}") from exc


class _Core:
    """Revised simplex on min c.x, Ax = b, x >= 0 with maintained basis inverse.

    Pricing uses Dantzig's rule until a degeneracy stall (a run of zero-step
    pivots), after which it switches to Bland's rule, whose smallest-index
    choices guarantee no cycling and hence finite termination.
    """

    _STALL = 20

    def __init__(self, a: np.ndarray, b: np.ndarray):
        self.a = a
        self.b = b
        self.m = a.shape[0]

    def run(self, c: np.ndarray, basis: list, binv: np.ndarray, allowed: int):
        a, b, m = self.a, self.b, self.m
        xb = binv @ b
        pivots = 0
        stall = 0
        bland = False
        basis_arr = np.asarray(basis, dtype=np.intp)
        cb = c[basis_arr]
        while True:
            if pivots >= _ITER_CAP:
                raise NumericalError("simplex iteration cap exceeded")
            y = cb @ binv
            rc = c - y @ a
            rc[basis_arr] = 0.0
            view = rc[:allowed]
            if bland:
                neg = np.nonzero(view < -FEAS_TOL)[0]
                if neg.size == 0:
                    return "optimal", list(basis_arr), binv, xb
                enter = int(neg[0])
            else:
                enter = int(np.argmin(view))
                if view[enter] >= -FEAS_TOL:
                    return "optimal", list(basis_arr), binv, xb
            d = binv @ a[:, enter]
            pos = d > FEAS_TOL
            if not pos.any():
                return "unbounded", list(basis_arr), binv, xb
            ratios = np.full(m, np.inf)
            ratios[pos] = np.maximum(xb[pos], 0.0) / d[pos]
            theta = ratios.min()
            ties = np.nonzero(ratios <= theta + 1e-12)[0]
            # leave on the smallest basic-variable index among ties (Bland)
            leave = int(ties[np.argmin(basis_arr[ties])])
            if theta <= 1e-12:
                stall += 1
                if stall >= self._STALL:
                    bland = True
            else:
                stall = 0
            xb = xb - theta * d
            xb[leave] = theta
            basis_arr[leave] = enter
            cb = c[basis_arr]
            pivots += 1
            if pivots % _REFRESH == 0:
                binv = _refactor(a, list(basis_arr))
                xb = binv @ b
            else:
                row = binv[leave] / d[leave]
                binv = binv - np.outer(d, row)
                binv[leave] = row


def _solve_standard(a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Two-phase solve of min c.x, Ax = b, x >= 0; returns (status, x)."""
    a = a.copy()
    b = b.copy()
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0
    m, n = a.shape
    if m == 0:  # no constraints: nonnegativity alone decides
        if np.any(c < -FEAS_TOL):
            return "unbounded", None
        return "optimal", np.zeros(n)

    # Phase 1: artificial identity basis, drive sum of artificials to zero.
    a1 = np.hstack([a, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    binv = np.eye(m)
    core = _Core(a1, b)
    status, basis, binv, xb = core.run(c1, basis, binv, allowed=n + m)
    if status != "optimal" or float(c1[basis] @ xb) > 1e-7 * (1.0 + abs(b).max()):
        return "infeasible", None
    # Pivot artificials out of the basis; rows where that is impossible are
    # redundant equalities and get dropped.
    drop_rows = []
    for r in range(m):
        if basis[r] < n:
            continue
        row = binv[r] @ a
        cand = np.nonzero(np.abs(row) > 1e-9)[0]
        cand = [j for j in cand if j not in set(basis)]
        if cand:
            j = cand[0]
            d = binv @ a[:, j]
            piv = binv[r] / d[r]
            binv = binv - np.outer(d, piv)
            binv[r] = piv
            basis[r] = j
        else:
            drop_rows.append(r)
    if drop_rows:
        keep = [r for r in range(m) if r not in drop_rows]
        a = a[keep]
        b = b[keep]
        m = len(keep)
        basis = [basis[r] for r in keep]
        if m == 0:
            return "optimal", np.zeros(n)

    core2 = _Core(a, b)
    binv = _refactor(a, basis)
    status, basis, binv, xb = core2.run(c, basis, binv, allowed=n)
    if status == "unbounded":
        return "unbounded", None
    x = np.zeros(n)
    x[basis] = np.maximum(xb, 0.0)
    return "optimal", x


def lp_solve(problem: LpProblem) -> LpSolution:
    """Solve a bounded-variable equality-form LP.

    Status is part of the result; infeasible/unbounded are ordinary returns.
    """
    problem.validate()
    c0 = np.asarray(problem.objective, dtype=np.float64)
    a0 = np.asarray(problem.eq_matrix, dtype=np.float64)
    b0 = np.asarray(problem.eq_rhs, dtype=np.float64).copy()
    lo = np.asarray(problem.lower_bounds, dtype=np.float64)
    hi = np.asarray(problem.upper_bounds, dtype=np.float64)
    n = c0.size

    cols = []          # columns of the standard-form matrix (over eq rows)
    costs = []
    recover = []       # (var index, sign, offset) per standard-form column
    ub_rows = []       # (column index in standard form, residual upper bound)
    for j in range(n):
        aj = a0[:, j]
        l, u = lo[j], hi[j]
        if _is_neg_inf(l) and _is_pos_inf(u):
            cols.append(aj)
            costs.append(c0[j])
            recover.append((j, 1.0, 0.0))
            cols.append(-aj)
            costs.append(-c0[j])
            recover.append((j, -1.0, 0.0))
        elif not _is_neg_inf(l):
            b0 -= aj * l
            cols.append(aj)
            costs.append(c0[j])
            recover.append((j, 1.0, l))
            if not _is_pos_inf(u):
                ub_rows.append((len(cols) - 1, u - l))
        else:  # upper bound only: substitute x = u - t, t >= 0
            b0 -= aj * u
            cols.append(-aj)
            costs.append(-c0[j])
            recover.append((j, -1.0, u))

    a = np.column_stack(cols) if cols else np.zeros((a0.shape[0], 0))
    c = np.array(costs)
    b = b0
    if ub_rows:
        k = len(ub_rows)
        pad = np.zeros((a.shape[0], k))
        a = np.hstack([a, pad])
        top = np.zeros((k, a.shape[1]))
        for r, (col, res) in enumerate(ub_rows):
            top[r, col] = 1.0
            top[r, a.shape[1] - k + r] = 1.0
        a = np.vstack([a, top])
        b = np.concatenate([b, np.array([res for _, res in ub_rows])])
        c = np.concatenate([c, np.zeros(k)])

    status, xs = _solve_standard(a, b, c)
    if status != "optimal":
        return LpSolution(status, float("nan"), np.full(n, np.nan))
    # free variables contribute two zero-offset columns, all others exactly one
    x = np.zeros(n)
    for col, (j, sign, off) in enumerate(recover):
        x[j] += sign * xs[col] + off
    value = float(c0 @ x)
    return LpSolution("optimal", value, x)


def l1_min(a, y):
    """min ||x||_1 subject to A x = y via the positive-part split.

    Returns (value, x, status); status is "infeasible" when y is outside the
    range of A.  A is n x N with n <= N typical, but no rank condition is
    required.
    """
    am = as_matrix(a)
    yv = np.asarray(y, dtype=np.float64)
    if yv.ndim != 1 or yv.size != am.shape[0]:
        raise DomainError("rhs length must equal the row count of A")
    if not np.isfinite(yv).all():
        raise DomainError("rhs must be finite")
    n_cols = am.shape[1]
    big = np.hstack([am, -am])
    c = np.ones(2 * n_cols)
    status, xs = _solve_standard(big, yv, c)
    if status != "optimal":
        return float("nan"), np.full(n_cols, np.nan), status
    x = xs[:n_cols] - xs[n_cols:]
    return float(np.abs(xs).sum()), x, "optimal"
