"""Sparse linear-program container.

Rows are stored in triplet form with a sense and right-hand side per row;
all variables are nonnegative and continuous. The container does no
solving; it validates structure and hands arrays to solvers and the MPS
writer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LE, EQ, GE = "<=", "=", ">="
SENSES = (LE, EQ, GE)


class BuildError(ValueError):
    """Structurally invalid LP construction request."""


@dataclass
class LPProblem:
    name: str = "lp"
    var_names: list[str] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)
    row_senses: list[str] = field(default_factory=list)
    row_rhs: list[float] = field(default_factory=list)
    # triplets
    entry_rows: list[int] = field(default_factory=list)
    entry_cols: list[int] = field(default_factory=list)
    entry_vals: list[float] = field(default_factory=list)

    def __post_init__(self):
        self._var_index: dict[str, int] = {n: i for i, n in enumerate(self.var_names)}
        self._row_index: dict[str, int] = {n: i for i, n in enumerate(self.row_names)}

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.row_names)

    @property
    def n_entries(self) -> int:
        return len(self.entry_vals)

    def add_variable(self, name: str, cost: float = 0.0) -> int:
        if name in self._var_index:
            raise BuildError(f"duplicate variable name {name!r}")
        if not math.isfinite(cost):
            raise BuildError(f"non-finite objective coefficient for {name!r}")
        idx = len(self.var_names)
        self.var_names.append(name)
        self.objective.append(cost)
        self._var_index[name] = idx
        return idx

    def add_objective(self, var: int, delta: float) -> None:
        if not math.isfinite(delta):
            raise BuildError(f"non-finite objective increment for column {var}")
        self.objective[var] += delta

    def add_row(self, name: str, sense: str, rhs: float, terms) -> int:
        if sense not in SENSES:
            raise BuildError(f"unknown sense {sense!r}")
        if name in self._row_index:
            raise BuildError(f"duplicate row name {name!r}")
        if not math.isfinite(rhs):
            raise BuildError(f"non-finite RHS in row {name!r}")
        row = len(self.row_names)
        self.row_names.append(name)
        self.row_senses.append(sense)
        self.row_rhs.append(rhs)
        for col, val in terms:
            if not 0 <= col < len(self.var_names):
                raise BuildError(f"row {name!r} references undeclared column {col}")
            if not math.isfinite(val):
                raise BuildError(f"non-finite coefficient in row {name!r}")
            if val != 0.0:
                self.entry_rows.append(row)
                self.entry_cols.append(col)
                self.entry_vals.append(val)
        self._row_index[name] = row
        return row

    def var_index(self, name: str) -> int:
        return self._var_index[name]

    def row_index(self, name: str) -> int:
        return self._row_index[name]

    def cost_array(self) -> np.ndarray:
        return np.asarray(self.objective, dtype=float)

    def rhs_array(self) -> np.ndarray:
        return np.asarray(self.row_rhs, dtype=float)

    def triplet_arrays(self):
        return (
            np.asarray(self.entry_rows, dtype=np.int64),
            np.asarray(self.entry_cols, dtype=np.int64),
            np.asarray(self.entry_vals, dtype=float),
        )

    def dense_matrix(self) -> np.ndarray:
        A = np.zeros((self.n_rows, self.n_vars))
        r, c, v = self.triplet_arrays()
        np.add.at(A, (r, c), v)
        return A

    def unused_variables(self) -> list[str]:
        """Names that appear in no row and carry no objective cost."""
        used = [False] * self.n_vars
        for col in self.entry_cols:
            used[col] = True
        for j, cost in enumerate(self.objective):
            if cost != 0.0:
                used[j] = True
        return [n for n, u in zip(self.var_names, used) if not u]

    def scaled_objective(self, factor: float) -> "LPProblem":
        """Copy with every objective coefficient multiplied by `factor`."""
        out = LPProblem(
            name=self.name,
            var_names=list(self.var_names),
            objective=[c * factor for c in self.objective],
            row_names=list(self.row_names),
            row_senses=list(self.row_senses),
            row_rhs=list(self.row_rhs),
            entry_rows=list(self.entry_rows),
            entry_cols=list(self.entry_cols),
            entry_vals=list(self.entry_vals),
        )
        return out
