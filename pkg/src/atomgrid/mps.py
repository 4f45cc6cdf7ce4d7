"""MPS export and import for LPProblem.

Writes the classic fixed-layout sections (NAME, ROWS, COLUMNS, RHS,
ENDATA) with whitespace-aligned fields; names may be long but contain no
whitespace. All variables use the MPS default bounds [0, inf), so no
BOUNDS section is emitted. Ordering is deterministic: columns in
declaration order, each column's entries in row-declaration order.
"""

from __future__ import annotations

from pathlib import Path

from .lp import EQ, GE, LE, BuildError, LPProblem

_SENSE_TO_TAG = {LE: "L", GE: "G", EQ: "E"}
_TAG_TO_SENSE = {v: k for k, v in _SENSE_TO_TAG.items()}

OBJ_NAME = "COST"
RHS_NAME = "RHS"


def _num(v: float) -> str:
    return f"{v:.15g}"


def export_mps(lp: LPProblem, path: str | Path) -> None:
    """Write `lp` as MPS text."""
    if lp.n_vars == 0:
        raise BuildError("no variables")
    width = max(8, max((len(n) for n in lp.var_names), default=8),
                max((len(n) for n in lp.row_names), default=8))

    # column-major entry lists, rows in declaration order within each column
    per_col: list[list[tuple[int, float]]] = [[] for _ in range(lp.n_vars)]
    for r, c, v in zip(lp.entry_rows, lp.entry_cols, lp.entry_vals):
        per_col[c].append((r, v))
    for entries in per_col:
        entries.sort(key=lambda rv: rv[0])

    lines = [f"NAME          {lp.name}", "ROWS", f" N  {OBJ_NAME}"]
    for name, sense in zip(lp.row_names, lp.row_senses):
        lines.append(f" {_SENSE_TO_TAG[sense]}  {name}")
    lines.append("COLUMNS")
    for j, cname in enumerate(lp.var_names):
        pairs = []
        if lp.objective[j] != 0.0:
            pairs.append((OBJ_NAME, lp.objective[j]))
        pairs.extend((lp.row_names[r], v) for r, v in per_col[j])
        if not pairs:
            # column with no entries anywhere: keep it visible via a zero
            # objective entry so the re-import preserves dimensions
            pairs.append((OBJ_NAME, 0.0))
        for i in range(0, len(pairs), 2):
            chunk = pairs[i:i + 2]
            fields = f"    {cname:<{width}}"
            for rname, val in chunk:
                fields += f"  {rname:<{width}}  {_num(val):>16}"
            lines.append(fields)
    lines.append("RHS")
    rhs_pairs = [
        (name, rhs)
        for name, rhs in zip(lp.row_names, lp.row_rhs)
        if rhs != 0.0
    ]
    for i in range(0, len(rhs_pairs), 2):
        chunk = rhs_pairs[i:i + 2]
        fields = f"    {RHS_NAME:<{width}}"
        for rname, val in chunk:
            fields += f"  {rname:<{width}}  {_num(val):>16}"
        lines.append(fields)
    lines.append("ENDATA")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class MPSParseError(ValueError):
    pass


def parse_mps(path: str | Path) -> LPProblem:
    """Read an MPS file written by `export_mps` (plus default-bound files
    from other tools, as long as they stick to N/L/G/E rows and RHS)."""
    lp = LPProblem()
    section = None
    obj_row = None
    row_sense: dict[str, str] = {}
    pending_rows: list[str] = []  # declaration order
    col_entries: dict[str, list[tuple[str, float]]] = {}
    col_order: list[str] = []
    rhs: dict[str, float] = {}

    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            keyword = head[0].upper()
            if keyword == "NAME":
                lp.name = head[1] if len(head) > 1 else "lp"
                section = None
            elif keyword in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES"):
                section = keyword
                if keyword == "RANGES":
                    raise MPSParseError("RANGES section not supported")
            elif keyword == "ENDATA":
                break
            else:
                raise MPSParseError(f"unknown section {keyword!r}")
            continue
        fields = raw.split()
        if section == "ROWS":
            tag, name = fields[0].upper(), fields[1]
            if tag == "N":
                if obj_row is None:
                    obj_row = name
                continue
            if tag not in _TAG_TO_SENSE:
                raise MPSParseError(f"unknown row tag {tag!r}")
            row_sense[name] = _TAG_TO_SENSE[tag]
            pending_rows.append(name)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                raise MPSParseError("integer markers not supported")
            cname = fields[0]
            if cname not in col_entries:
                col_entries[cname] = []
                col_order.append(cname)
            for i in range(1, len(fields) - 1, 2):
                col_entries[cname].append((fields[i], float(fields[i + 1])))
        elif section == "RHS":
            for i in range(1, len(fields) - 1, 2):
                rhs[fields[i]] = float(fields[i + 1])
        elif section == "BOUNDS":
            raise MPSParseError("BOUNDS section not supported (defaults only)")
        else:
            raise MPSParseError(f"data line outside a known section: {raw!r}")

    col_index = {name: lp.add_variable(name) for name in col_order}
    row_terms: dict[str, list[tuple[int, float]]] = {name: [] for name in pending_rows}
    for cname in col_order:
        for rname, val in col_entries[cname]:
            if rname == obj_row:
                lp.add_objective(col_index[cname], val)
            elif rname in row_terms:
                row_terms[rname].append((col_index[cname], val))
            else:
                raise MPSParseError(f"column {cname!r} references unknown row {rname!r}")
    for rname in pending_rows:
        lp.add_row(rname, row_sense[rname], rhs.get(rname, 0.0), row_terms[rname])
    return lp
