"""Solution contract, solver dispatch, and independent optimality checks.

`solve_reference` runs the bundled simplex; `solve_backend` dispatches to
registered adapters (a scipy/HiGHS adapter ships by default, plus a
subprocess bridge that exchanges MPS and JSON files with an external
solver command). The `ATOMGRID_SOLVER` environment variable picks the
default backend.

Dual convention, for min cᵀx with rows Ax {<=,=,>=} b and x >= 0:
dual objective is bᵀy with y <= 0 on `<=` rows, y >= 0 on `>=` rows,
free on `=` rows, so cᵀx = bᵀy at an optimum.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .lp import EQ, GE, LE, LPProblem
from .mps import export_mps
from .simplex import (  # noqa: F401  (re-exported guard errors)
    DEFAULT_MAX_VARS,
    NumericalBreakdownError,
    SizeGuardError,
    solve_reference_lp,
)

OPTIMAL, INFEASIBLE, UNBOUNDED = "Optimal", "Infeasible", "Unbounded"


class BackendUnavailableError(RuntimeError):
    """Requested solver backend is not registered or cannot run."""


class VerificationError(RuntimeError):
    def __init__(self, message: str, offending: str | None = None):
        super().__init__(message if offending is None else f"{message} [{offending}]")
        self.offending = offending


@dataclass
class Solution:
    status: str
    objective: float | None = None
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    var_names: list[str] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)
    solver: str = "reference"
    meta: dict = field(default_factory=dict)

    def variables(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.var_names, self.x)}

    def dual_by_row(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.row_names, self.duals)}

    def to_json_dict(self) -> dict:
        out = {
            "schema_version": 1,
            "status": self.status,
            "solver": self.solver,
            "objective": self.objective,
        }
        if self.x is not None:
            out["variables"] = self.variables()
        if self.duals is not None:
            out["duals"] = self.dual_by_row()
        return out

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def solve_reference(lp: LPProblem, tol: float = 1e-9,
                    max_vars: int = DEFAULT_MAX_VARS) -> Solution:
    """Solve with the bundled simplex (small instances only)."""
    status, x, duals, objective = solve_reference_lp(lp, tol=tol, max_vars=max_vars)
    return Solution(
        status=status,
        objective=objective,
        x=x,
        duals=duals,
        var_names=list(lp.var_names),
        row_names=list(lp.row_names),
        solver="reference",
    )


# ---------------------------------------------------------------------------
# backends
# ---------------------------------------------------------------------------


def _solve_scipy(lp: LPProblem, options: dict) -> Solution:
    rows, cols, vals = lp.triplet_arrays()
    senses = np.asarray(lp.row_senses)
    rhs = lp.rhs_array()
    n = lp.n_vars

    le_rows = np.where(senses == LE)[0]
    ge_rows = np.where(senses == GE)[0]
    eq_rows = np.where(senses == EQ)[0]

    # inequality block: <= rows as-is, >= rows negated
    ub_index = {int(r): i for i, r in enumerate(le_rows)}
    ub_offset = len(le_rows)
    for i, r in enumerate(ge_rows):
        ub_index[int(r)] = ub_offset + i
    n_ub = len(le_rows) + len(ge_rows)
    eq_index = {int(r): i for i, r in enumerate(eq_rows)}

    sign = np.ones(len(vals))
    a_ub_r, a_ub_c, a_ub_v = [], [], []
    a_eq_r, a_eq_c, a_eq_v = [], [], []
    for r, c, v in zip(rows, cols, vals):
        r = int(r)
        if r in eq_index:
            a_eq_r.append(eq_index[r]); a_eq_c.append(c); a_eq_v.append(v)
        else:
            flip = -1.0 if senses[r] == GE else 1.0
            a_ub_r.append(ub_index[r]); a_ub_c.append(c); a_ub_v.append(flip * v)
    b_ub = np.concatenate([rhs[le_rows], -rhs[ge_rows]]) if n_ub else None
    A_ub = (
        sparse.csr_matrix((a_ub_v, (a_ub_r, a_ub_c)), shape=(n_ub, n))
        if n_ub else None
    )
    b_eq = rhs[eq_rows] if len(eq_rows) else None
    A_eq = (
        sparse.csr_matrix((a_eq_v, (a_eq_r, a_eq_c)), shape=(len(eq_rows), n))
        if len(eq_rows) else None
    )

    res = linprog(
        lp.cost_array(), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
        bounds=(0, None), method="highs",
        options={"presolve": options.get("presolve", True)},
    )
    if res.status == 2:
        return Solution(status=INFEASIBLE, solver="scipy")
    if res.status == 3:
        return Solution(status=UNBOUNDED, solver="scipy")
    if res.status != 0:
        raise BackendUnavailableError(f"scipy/HiGHS failed: {res.message}")

    duals = np.zeros(lp.n_rows)
    if n_ub:
        marg = res.ineqlin.marginals
        for r, i in ub_index.items():
            duals[r] = marg[i] if senses[r] == LE else -marg[i]
    if len(eq_rows):
        for r, i in eq_index.items():
            duals[r] = res.eqlin.marginals[i]
    return Solution(
        status=OPTIMAL,
        objective=float(res.fun),
        x=np.asarray(res.x),
        duals=duals,
        var_names=list(lp.var_names),
        row_names=list(lp.row_names),
        solver="scipy",
        meta={"iterations": int(getattr(res, "nit", 0))},
    )


def _solve_reference_backend(lp: LPProblem, options: dict) -> Solution:
    return solve_reference(lp, tol=float(options.get("tol", 1e-9)))


def _solve_mps_subprocess(lp: LPProblem, options: dict) -> Solution:
    """Bridge to an external solver: `cmd` is a template receiving {mps}
    and {out}; it must write a solution JSON with status/objective/
    variables (and optionally duals) keyed by the LP's names."""
    cmd = options.get("cmd")
    if not cmd:
        raise BackendUnavailableError("mps_subprocess backend needs a `cmd` option")
    with tempfile.TemporaryDirectory(prefix="atomgrid_") as tmp:
        mps_path = Path(tmp) / "problem.mps"
        out_path = Path(tmp) / "solution.json"
        export_mps(lp, mps_path)
        argv = [a.format(mps=str(mps_path), out=str(out_path)) for a in shlex.split(cmd)]
        proc = subprocess.run(argv, capture_output=True, text=True)
        if proc.returncode not in (0, 3):
            raise BackendUnavailableError(
                f"external solver failed (exit {proc.returncode}): {proc.stderr.strip()[:500]}"
            )
        payload = json.loads(out_path.read_text(encoding="utf-8"))
    status = payload["status"]
    if status != OPTIMAL:
        return Solution(status=status, solver="mps_subprocess")
    values = payload.get("variables", {})
    x = np.array([values.get(name, 0.0) for name in lp.var_names])
    dual_map = payload.get("duals", {})
    duals = np.array([dual_map.get(name, 0.0) for name in lp.row_names])
    return Solution(
        status=OPTIMAL,
        objective=float(payload["objective"]),
        x=x,
        duals=duals if dual_map else None,
        var_names=list(lp.var_names),
        row_names=list(lp.row_names),
        solver="mps_subprocess",
    )


_BACKENDS = {
    "scipy": (_solve_scipy, {"presolve"}),
    "reference": (_solve_reference_backend, {"tol"}),
    "mps_subprocess": (_solve_mps_subprocess, {"cmd"}),
}


def register_backend(backend_id: str, fn, option_keys=()) -> None:
    _BACKENDS[backend_id] = (fn, set(option_keys))


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def default_backend() -> str:
    return os.environ.get("ATOMGRID_SOLVER", "scipy")


def solve_backend(lp: LPProblem, backend_id: str | None = None,
                  options: dict | None = None) -> Solution:
    """Solve through a registered backend; options are validated up front."""
    backend_id = backend_id or default_backend()
    if backend_id not in _BACKENDS:
        raise BackendUnavailableError(
            f"backend {backend_id!r} not registered (have {available_backends()})"
        )
    fn, allowed = _BACKENDS[backend_id]
    options = dict(options or {})
    unknown = set(options) - allowed
    if unknown:
        raise ValueError(
            f"backend {backend_id!r} does not accept options {sorted(unknown)}"
        )
    return fn(lp, options)


def solve_auto(lp: LPProblem, backend_id: str | None = None,
               options: dict | None = None,
               reference_max_vars: int = 2000) -> Solution:
    """Reference simplex for small LPs, otherwise the default backend."""
    if backend_id is None and lp.n_vars <= reference_max_vars:
        return solve_reference(lp)
    return solve_backend(lp, backend_id=backend_id, options=options)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class OptimalityReport:
    primal_residual: float
    dual_residual: float
    duality_gap: float
    complementarity: float
    worst_row: str = ""
    worst_col: str = ""

    def __str__(self):
        return (
            f"primal {self.primal_residual:.3e}  dual {self.dual_residual:.3e}  "
            f"gap {self.duality_gap:.3e}  compl {self.complementarity:.3e}"
        )


def verify_optimality(lp: LPProblem, sol: Solution, tol: float = 1e-6) -> OptimalityReport:
    """Check primal/dual feasibility, complementary slackness, and strong
    duality of a claimed-optimal solution; raise on any violation."""
    if sol.status != OPTIMAL:
        raise VerificationError(f"solution status is {sol.status}, not {OPTIMAL}")
    if sol.x is None or sol.duals is None:
        raise VerificationError("solution lacks primal or dual values")
    x = np.asarray(sol.x)
    y = np.asarray(sol.duals)
    c = lp.cost_array()
    b = lp.rhs_array()
    rows, cols, vals = lp.triplet_arrays()
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(lp.n_rows, lp.n_vars))
    ax = A @ x if lp.n_rows else np.zeros(0)
    senses = np.asarray(lp.row_senses)

    b_scale = 1.0 + float(np.max(np.abs(b), initial=0.0))
    c_scale = 1.0 + float(np.max(np.abs(c), initial=0.0))

    viol = np.zeros(lp.n_rows)
    le = senses == LE
    ge = senses == GE
    eq = senses == EQ
    viol[le] = np.maximum(0.0, ax[le] - b[le])
    viol[ge] = np.maximum(0.0, b[ge] - ax[ge])
    viol[eq] = np.abs(ax[eq] - b[eq])
    lower = np.maximum(0.0, -x)
    primal_residual = float(max(viol.max(initial=0.0), lower.max(initial=0.0)))
    worst_row = lp.row_names[int(np.argmax(viol))] if lp.n_rows else ""
    if primal_residual > tol * b_scale:
        raise VerificationError(
            f"primal infeasibility {primal_residual:.3e} exceeds {tol * b_scale:.3e}",
            offending=worst_row,
        )

    # dual feasibility: sign conditions and reduced costs >= 0
    sign_viol = np.zeros(lp.n_rows)
    sign_viol[le] = np.maximum(0.0, y[le])
    sign_viol[ge] = np.maximum(0.0, -y[ge])
    reduced = c - (A.T @ y if lp.n_rows else 0.0)
    red_viol = np.maximum(0.0, -reduced)
    dual_residual = float(max(sign_viol.max(initial=0.0), red_viol.max(initial=0.0)))
    worst_col = lp.var_names[int(np.argmax(red_viol))] if lp.n_vars else ""
    if dual_residual > tol * c_scale:
        offender = (
            lp.row_names[int(np.argmax(sign_viol))]
            if sign_viol.max(initial=0.0) >= red_viol.max(initial=0.0)
            else worst_col
        )
        raise VerificationError(
            f"dual infeasibility {dual_residual:.3e} exceeds {tol * c_scale:.3e}",
            offending=offender,
        )

    primal_obj = float(c @ x)
    dual_obj = float(b @ y) if lp.n_rows else 0.0
    duality_gap = abs(primal_obj - dual_obj)
    if duality_gap > tol * (1.0 + abs(primal_obj)):
        raise VerificationError(
            f"strong duality gap {duality_gap:.3e} exceeds "
            f"{tol * (1.0 + abs(primal_obj)):.3e}"
        )

    slack = b - ax
    compl_rows = float(np.max(np.abs(y * slack), initial=0.0)) / b_scale
    compl_cols = float(np.max(np.abs(x * reduced), initial=0.0)) / (b_scale * c_scale)
    complementarity = max(compl_rows, compl_cols)

    return OptimalityReport(
        primal_residual=primal_residual,
        dual_residual=dual_residual,
        duality_gap=duality_gap,
        complementarity=complementarity,
        worst_row=worst_row,
        worst_col=worst_col,
    )
