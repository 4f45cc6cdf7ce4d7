"""Brute-force vertex-enumeration oracle for small LPs.

Independent of every solver code path: it enumerates candidate active
sets (constraint rows, nonnegativity bounds, and a large bounding box),
solves the square systems directly, and scans feasible vertices. The box
exposes unboundedness: if the best objective strictly improves on a
box-touching vertex, the true problem is unbounded (valid while genuine
optima stay far inside the box).
"""

from itertools import combinations

import numpy as np

from atomgrid.lp import EQ, GE, LE, LPProblem

BIG = 1e6


def oracle_solve(lp: LPProblem, big: float = BIG, feas_tol: float = 1e-6):
    """Return (status, objective) by exhaustive vertex enumeration."""
    n = lp.n_vars
    c = lp.cost_array()
    A = lp.dense_matrix()
    b = lp.rhs_array()
    senses = list(lp.row_senses)

    planes = []  # (normal, offset, is_box)
    for i in range(lp.n_rows):
        planes.append((A[i], b[i], False))
    eye = np.eye(n)
    for j in range(n):
        planes.append((eye[j], 0.0, False))
    for j in range(n):
        planes.append((eye[j], big, True))

    def feasible(x):
        if np.any(x < -feas_tol) or np.any(x > big + feas_tol):
            return False
        ax = A @ x if lp.n_rows else np.zeros(0)
        for i, sense in enumerate(senses):
            if sense == LE and ax[i] > b[i] + feas_tol * (1 + abs(b[i])):
                return False
            if sense == GE and ax[i] < b[i] - feas_tol * (1 + abs(b[i])):
                return False
            if sense == EQ and abs(ax[i] - b[i]) > feas_tol * (1 + abs(b[i])):
                return False
        return True

    # equality rows are active at every vertex; pick the rest freely
    eq_idx = [i for i, s in enumerate(senses) if s == EQ]
    free_idx = [k for k in range(len(planes)) if not (k < lp.n_rows and senses[k] == EQ)]
    base = [(A[i], b[i], False) for i in eq_idx]
    need = n - len(base)
    if need < 0:
        need = 0

    best_interior = None
    best_boxed = None
    found_feasible = False
    for combo in combinations(free_idx, need):
        sel = base + [planes[k] for k in combo]
        M = np.array([p[0] for p in sel])
        v = np.array([p[1] for p in sel])
        if M.shape[0] != n:
            continue
        try:
            x = np.linalg.solve(M, v)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)) or not feasible(x):
            continue
        found_feasible = True
        obj = float(c @ x)
        on_box = any(p[2] for p in sel) and np.any(x > big - 1.0)
        if on_box:
            if best_boxed is None or obj < best_boxed:
                best_boxed = obj
        else:
            if best_interior is None or obj < best_interior:
                best_interior = obj

    if not found_feasible:
        return "Infeasible", None
    if best_boxed is not None and (
        best_interior is None
        or best_boxed < best_interior - 1e-3 * (1.0 + abs(best_interior))
    ):
        return "Unbounded", None
    return "Optimal", best_interior if best_interior is not None else best_boxed
