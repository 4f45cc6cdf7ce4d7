"""Bundled reference LP solver: dense two-phase revised simplex.

Meant for small instances (unit tests, toy problems, oracle duty); a size
guard redirects anything big to a registered backend. Dantzig pricing
with a permanent switch to Bland's rule once the objective stalls, so
degenerate problems cannot cycle. Basis inverse is maintained by pivot
updates and refactorized periodically.

Standard form used internally: rows are converted to equalities with
slack/surplus columns, right-hand sides made nonnegative by row negation,
and artificial columns complete the starting basis. Duals are read off
the final basis and mapped back to the original row orientation.
"""

from __future__ import annotations

import numpy as np

from .lp import EQ, GE, LE, LPProblem

DEFAULT_MAX_VARS = 5000


class SizeGuardError(RuntimeError):
    """LP exceeds the reference-solver size guard; use a backend."""


class NumericalBreakdownError(RuntimeError):
    def __init__(self, message: str, condition: float | None = None):
        if condition is not None:
            message = f"{message} (basis condition estimate {condition:.3e})"
        super().__init__(message)
        self.condition = condition


class _Tableau:
    """Equality-form data plus basis bookkeeping for one simplex phase."""

    def __init__(self, A, b, c, basis, allowed):
        self.A = A
        self.b = b
        self.c = c
        self.basis = list(basis)
        self.allowed = allowed          # columns allowed to enter
        self.m, self.n = A.shape
        self.refactor()

    def refactor(self):
        base = self.A[:, self.basis]
        try:
            self.binv = np.linalg.inv(base)
        except np.linalg.LinAlgError:
            raise NumericalBreakdownError(
                "singular basis during refactorization",
                condition=float(np.linalg.cond(base)),
            ) from None
        self.xb = self.binv @ self.b

    def duals(self):
        return self.c[self.basis] @ self.binv

    def objective(self):
        return float(self.c[self.basis] @ self.xb)

    def pivot(self, entering, leave_pos, direction, theta):
        self.xb = self.xb - theta * direction
        self.xb[leave_pos] = theta
        self.basis[leave_pos] = entering
        # elementary row update of the inverse
        pivot_val = direction[leave_pos]
        row = self.binv[leave_pos] / pivot_val
        self.binv -= np.outer(direction, row)
        self.binv[leave_pos] = row
        self.xb[np.abs(self.xb) < 1e-13] = 0.0


def _run_phase(tab: _Tableau, *, price_tol, pivot_tol, maxiter, stall_limit, refactor_every):
    """Iterate to optimality. Returns 'optimal' or 'unbounded'."""
    bland = False
    stall = 0
    last_obj = tab.objective()
    since_refactor = 0
    for _ in range(maxiter):
        y = tab.duals()
        reduced = tab.c - y @ tab.A
        in_basis = np.zeros(tab.n, dtype=bool)
        in_basis[tab.basis] = True
        candidates = np.where(tab.allowed & ~in_basis & (reduced < -price_tol))[0]
        if candidates.size == 0:
            return "optimal"
        if bland:
            entering = int(candidates[0])
        else:
            entering = int(candidates[np.argmin(reduced[candidates])])
        direction = tab.binv @ tab.A[:, entering]
        positive = direction > pivot_tol
        if not np.any(positive):
            return "unbounded"
        ratios = np.full(tab.m, np.inf)
        ratios[positive] = tab.xb[positive] / direction[positive]
        theta = ratios.min()
        ties = np.where(ratios <= theta + 1e-9 * (1.0 + abs(theta)))[0]
        # smallest basic column index among ties (Bland-compatible tie break)
        leave_pos = int(ties[np.argmin(np.asarray(tab.basis)[ties])])
        tab.pivot(entering, leave_pos, direction, max(theta, 0.0))
        since_refactor += 1
        if since_refactor >= refactor_every:
            tab.refactor()
            since_refactor = 0
        obj = tab.objective()
        if obj >= last_obj - 1e-12 * (1.0 + abs(last_obj)):
            stall += 1
            if stall >= stall_limit:
                bland = True
        else:
            stall = 0
        last_obj = obj
    raise NumericalBreakdownError(f"iteration limit {maxiter} exceeded")


def solve_reference_arrays(c, senses, rhs, rows_matrix, *, tol=1e-9, maxiter=None):
    """Two-phase simplex on row-form data. Returns (status, x, duals, objective).

    `rows_matrix` is dense (m x n); senses per row from {<=, =, >=}; all
    variables nonnegative.
    """
    A0 = np.asarray(rows_matrix, dtype=float)
    b0 = np.asarray(rhs, dtype=float)
    c0 = np.asarray(c, dtype=float)
    m, n = A0.shape
    if m == 0:
        if np.all(c0 >= -tol):
            return "Optimal", np.zeros(n), np.zeros(0), 0.0
        return "Unbounded", None, None, None

    # equality form: append slack/surplus columns
    slack_cols = []
    slack_sign = []
    for i, sense in enumerate(senses):
        if sense == LE:
            slack_cols.append(i)
            slack_sign.append(1.0)
        elif sense == GE:
            slack_cols.append(i)
            slack_sign.append(-1.0)
    n_slack = len(slack_cols)
    A = np.zeros((m, n + n_slack))
    A[:, :n] = A0
    for j, (i, sign) in enumerate(zip(slack_cols, slack_sign)):
        A[i, n + j] = sign
    b = b0.copy()

    flipped = b < 0
    A[flipped] *= -1.0
    b[flipped] *= -1.0

    # starting basis: unit slack columns where available, artificials elsewhere
    basis = [-1] * m
    for j, i in enumerate(slack_cols):
        if A[i, n + j] == 1.0:
            basis[i] = n + j
    art_rows = [i for i in range(m) if basis[i] == -1]
    n_art = len(art_rows)
    if n_art:
        art_block = np.zeros((m, n_art))
        for j, i in enumerate(art_rows):
            art_block[i, j] = 1.0
            basis[i] = n + n_slack + j
        A = np.hstack([A, art_block])

    n_real = n + n_slack
    total = A.shape[1]
    maxiter = maxiter or 50 * (m + total + 10)
    feas_tol = tol * 1000.0 * (1.0 + float(np.max(np.abs(b), initial=0.0)))

    if n_art:
        c1 = np.zeros(total)
        c1[n_real:] = 1.0
        allowed = np.ones(total, dtype=bool)
        tab = _Tableau(A, b, c1, basis, allowed)
        _run_phase(tab, price_tol=tol, pivot_tol=tol, maxiter=maxiter,
                   stall_limit=100, refactor_every=64)
        tab.refactor()
        if tab.objective() > feas_tol:
            return "Infeasible", None, None, None
        # drive remaining artificials out of the basis; drop dependent rows
        keep_rows = list(range(m))
        while True:
            art_pos = [p for p, col in enumerate(tab.basis) if col >= n_real]
            if not art_pos:
                break
            p = art_pos[0]
            pivot_row = tab.binv[p] @ tab.A[:, :n_real]
            choices = [int(j) for j in np.where(np.abs(pivot_row) > 1e-7)[0]
                       if j not in tab.basis]
            if choices:
                j = choices[0]
                direction = tab.binv @ tab.A[:, j]
                tab.pivot(j, p, direction, 0.0)
                tab.refactor()
            else:
                # redundant constraint: remove the row entirely
                keep_rows.pop(p)
                rows_kept = [i for i in range(tab.m) if i != p]
                new_basis = [tab.basis[q] for q in rows_kept]
                tab = _Tableau(tab.A[rows_kept], tab.b[rows_kept],
                               tab.c, new_basis, tab.allowed)
        basis = tab.basis
        A = tab.A[:, :n_real]
        b = tab.b
        row_map = keep_rows
    else:
        row_map = list(range(m))

    c2 = np.zeros(n_real)
    c2[:n] = c0
    allowed = np.ones(n_real, dtype=bool)
    tab = _Tableau(A[:, :n_real], b, c2, basis, allowed)
    price_tol = tol * (1.0 + float(np.max(np.abs(c0), initial=0.0)))
    status = _run_phase(tab, price_tol=price_tol, pivot_tol=tol,
                        maxiter=maxiter, stall_limit=100, refactor_every=64)
    if status == "unbounded":
        return "Unbounded", None, None, None
    tab.refactor()

    x_full = np.zeros(n_real)
    x_full[np.asarray(tab.basis, dtype=int)] = tab.xb
    x = x_full[:n]
    y_reduced = tab.duals()
    duals = np.zeros(m)
    for local, original in enumerate(row_map):
        duals[original] = y_reduced[local]
    duals[flipped] *= -1.0
    return "Optimal", x, duals, float(c0 @ x)


def solve_reference_lp(lp: LPProblem, *, tol=1e-9, max_vars=DEFAULT_MAX_VARS):
    """Reference solve of an LPProblem. Guarded by a variable-count limit."""
    if lp.n_vars > max_vars:
        raise SizeGuardError(
            f"{lp.n_vars} variables exceed the reference guard of {max_vars}; "
            "use a backend"
        )
    A = lp.dense_matrix()
    return solve_reference_arrays(
        lp.cost_array(), list(lp.row_senses), lp.rhs_array(), A, tol=tol
    )
