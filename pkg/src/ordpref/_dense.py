"""Dense tableau simplex for the small programs inside search and prediction.

The per-node programs have at most a dozen equality rows and a few hundred
columns; general backends spend far more time in setup than solving at
that size.  The engine here keeps a full tableau updated by rank-1 pivot
operations, picks entering columns by largest violation, and switches to
Bland's rule after a stretch of degenerate pivots so it cannot cycle.
Every wrapper re-checks its answer against the original system; any doubt
(singular basis, large residual, pivot cap) raises DenseTrouble and the
caller retries on the general backend.
"""

from __future__ import annotations

import numpy as np

_TOL = 1e-9
_FEAS_TOL = 1e-7
_MAX_PIVOTS = 20_000
_STALL_LIMIT = 60

_LOWER, _UPPER, _BASIC = 0, 1, 2


class DenseTrouble(RuntimeError):
    """Numerical doubt in the dense path; retry with the general backend."""


class _Tableau:
    """Bounded-variable simplex state over matrix @ x = rhs, 0 <= x <= upper.

    Assumes the trailing identity columns form the initial basis, so the
    starting tableau is the matrix itself.  ``run`` minimizes one cost
    vector and may be called again (for a second phase) with the basis it
    reached.
    """

    def __init__(self, matrix: np.ndarray, rhs: np.ndarray, upper: np.ndarray):
        rows, cols = matrix.shape
        self.rows, self.cols = rows, cols
        self.tab = matrix.astype(float).copy()
        self.xb = rhs.astype(float).copy()
        self.upper = upper
        self.basis = list(range(cols - rows, cols))
        self.where = np.full(cols, _LOWER, dtype=np.int8)
        self.where[self.basis] = _BASIC
        self.allowed = np.ones(cols, dtype=bool)

    def run(self, cost: np.ndarray) -> None:
        z = cost - cost[self.basis] @ self.tab
        stall = 0
        for _ in range(_MAX_PIVOTS):
            violation = np.where(
                self.allowed & (self.where == _LOWER),
                -z,
                np.where(self.allowed & (self.where == _UPPER), z, -np.inf),
            )
            if stall < _STALL_LIMIT:
                q = int(np.argmax(violation))
                if violation[q] <= _TOL:
                    return
            else:  # Bland: smallest improvable index, cycling impossible
                improving = np.flatnonzero(violation > _TOL)
                if improving.size == 0:
                    return
                q = int(improving[0])
            sign = 1.0 if self.where[q] == _LOWER else -1.0
            col = self.tab[:, q]
            move = sign * col  # basic values change by -move * t
            t_best = self.upper[q]
            blockers: list[tuple[float, int]] = []
            for i in range(self.rows):
                if move[i] > _TOL:
                    t = max(self.xb[i], 0.0) / move[i]
                elif move[i] < -_TOL and np.isfinite(self.upper[self.basis[i]]):
                    t = max(self.upper[self.basis[i]] - self.xb[i], 0.0) / -move[i]
                else:
                    continue
                blockers.append((t, i))
                t_best = min(t_best, t)
            if not np.isfinite(t_best):
                raise DenseTrouble("unbounded improving direction")
            stall = stall + 1 if t_best <= 1e-11 else 0
            eligible = [i for t, i in blockers if t <= t_best + 1e-9]
            if not eligible:
                self.xb -= sign * self.upper[q] * col
                self.where[q] = _UPPER if self.where[q] == _LOWER else _LOWER
                continue
            if stall < _STALL_LIMIT:
                p = max(eligible, key=lambda i: abs(col[i]))
            else:
                p = min(eligible, key=lambda i: self.basis[i])
            pivot = col[p]
            if abs(pivot) < 1e-9:
                raise DenseTrouble("vanishing pivot")
            leaving = self.basis[p]
            start = 0.0 if self.where[q] == _LOWER else self.upper[q]
            self.xb -= sign * t_best * col
            self.xb[p] = start + sign * t_best
            self.where[leaving] = _LOWER if move[p] > 0 else _UPPER
            col = col.copy()  # row update below would corrupt the live view
            pivot_row = self.tab[p, :] / pivot
            self.tab -= np.outer(col, pivot_row)
            self.tab[p, :] = pivot_row
            z = z - z[q] * pivot_row
            self.basis[p] = q
            self.where[q] = _BASIC
        raise DenseTrouble("pivot cap reached")

    def solution(self) -> np.ndarray:
        x = np.zeros(self.cols)
        at_upper = np.flatnonzero(self.where == _UPPER)
        if at_upper.size:
            x[at_upper] = self.upper[at_upper]
        x[self.basis] = self.xb
        return x


def kernel_certificate(matrix: np.ndarray) -> tuple[bool, np.ndarray]:
    """Look for lam >= 0 with matrix @ lam = 0 and coordinates summing to 1.

    Such a point weights the columns into an exact cancellation, which is
    what makes the underlying constraint rows jointly unsatisfiable; its
    absence means the rows admit a solution.  Returns (found, lam).
    """
    rows, m = matrix.shape
    if m == 0:
        return False, np.zeros(0)
    system = np.vstack([matrix.astype(float), np.ones((1, m))])
    target = np.zeros(rows + 1)
    target[-1] = 1.0
    full = np.hstack([system, np.eye(rows + 1)])
    upper = np.full(m + rows + 1, np.inf)
    tableau = _Tableau(full, target, upper)
    cost = np.concatenate([np.zeros(m), np.ones(rows + 1)])
    tableau.run(cost)
    x = tableau.solution()
    if float(x[m:].sum()) > _FEAS_TOL:
        return False, np.zeros(m)
    lam = np.maximum(x[:m], 0.0)
    total = float(lam.sum())
    if total <= 0.5 or np.max(np.abs(matrix @ lam), initial=0.0) > _FEAS_TOL:
        raise DenseTrouble("certificate residual too large")
    return True, lam / total


def min_total_nonneg(
    matrix: np.ndarray, target: np.ndarray
) -> tuple[bool, float, np.ndarray]:
    """Minimize sum(y) over matrix @ y = target, y >= 0.

    Returns (feasible, objective, y); infeasibility is a legitimate
    outcome (the nonnegative span of the columns misses the target).
    """
    rows, m = matrix.shape
    if rows == 0:
        return True, 0.0, np.zeros(m)
    work = matrix.astype(float).copy()
    rhs = np.asarray(target, dtype=float).copy()
    flip = rhs < 0
    work[flip] *= -1.0
    rhs[flip] *= -1.0
    full = np.hstack([work, np.eye(rows)])
    upper = np.full(m + rows, np.inf)
    tableau = _Tableau(full, rhs, upper)
    phase1 = np.concatenate([np.zeros(m), np.ones(rows)])
    tableau.run(phase1)
    x = tableau.solution()
    if float(x[m:].sum()) > _FEAS_TOL * (1.0 + np.max(np.abs(rhs), initial=0.0)):
        return False, float("inf"), np.zeros(m)
    tableau.upper[m:] = 0.0  # pin artificials; any still basic are stuck at zero
    tableau.allowed[m:] = False
    phase2 = np.concatenate([np.ones(m), np.zeros(rows)])
    tableau.run(phase2)
    y = np.maximum(tableau.solution()[:m], 0.0)
    resid = np.max(np.abs(matrix @ y - np.asarray(target, dtype=float)), initial=0.0)
    if resid > 1e-6 * (1.0 + np.max(np.abs(target), initial=0.0)):
        raise DenseTrouble("dual residual too large")
    return True, float(y.sum()), y
