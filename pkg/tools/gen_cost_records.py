#!/usr/bin/env python3
"""Regenerate src/atomgrid/data/cost_records.csv.

The bundled record set is a desk-scale stand-in for the literature survey:
per (reactor type, readiness) it contains records whose escalated values
reproduce the published aggregate statistics (count, mean, min, max for
overnight cost; combined per-MWh O&M; fuel). Records are spread over
currency years so the escalation path is actually exercised; amounts are
written as target/factor at full precision so escalation recovers the
target to float accuracy.
"""

import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from atomgrid.costs import EscalationTable

DATA = Path(__file__).resolve().parents[1] / "src" / "atomgrid" / "data"

# (type, readiness) -> (n, mean, min, max), overnight cost in USD-2019/kW
OCC_STATS = {
    ("LWR", "FOAK"): (5, 5622.9, 3880.0, 7164.0),
    ("SMR", "FOAK"): (12, 9241.42, 3466.2, 26452.44),
    ("SFR", "FOAK"): (5, 9511.47, 4641.0, 20511.0),
    ("HTR", "FOAK"): (18, 9438.52, 3466.2, 26452.22),
    ("LWR", "NOAK"): (16, 4983.78, 1782.62, 9035.4),
    ("SMR", "NOAK"): (10, 4407.51, 1940.0, 7735.0),
    ("SFR", "NOAK"): (15, 4677.97, 1476.0, 7380.0),
    ("HTR", "NOAK"): (22, 5649.65, 2501.33, 11618.0),
    ("LFR", "NOAK"): (5, 4910.07, 2952.0, 7735.0),
    ("MSR", "NOAK"): (11, 5167.05, 2988.75, 10447.31),
    ("MSFR", "NOAK"): (1, 1891.5, 1891.5, 1891.5),
}

# Combined per-MWh O&M targets: FOAK list has the mean only (single record);
# NOAK lists are (min, mean, max) chosen so mean and min land on the
# published level parameters.
OM_VALUES = {
    ("LWR", "FOAK"): [27.03],
    ("SMR", "FOAK"): [47.49],
    ("SFR", "FOAK"): [50.48],
    ("HTR", "FOAK"): [45.29],
    ("LWR", "NOAK"): [8.37, 20.45, 32.53],
    ("SMR", "NOAK"): [15.05, 20.82, 26.59],
    ("SFR", "NOAK"): [13.31, 19.93, 26.55],
    ("HTR", "NOAK"): [3.13, 33.65, 64.17],
}

FUEL_VALUES = {
    ("LWR", "FOAK"): [11.9],
    ("LWR", "NOAK"): [9.16],
}

OCC_YEARS = [2019, 2010, 2015, 2004, 2018, 2008, 2012, 2016, 2001,
             2017, 2011, 2013, 2009, 2014, 2005, 2002, 2020, 2021,
             2006, 2007, 2022, 2003]
OM_YEARS = [2019, 2016, 2012, 2018, 2010]


def target_values(n, mean, vmin, vmax):
    """n values with the requested min/mean/max; middles symmetric."""
    if n == 1:
        return [mean]
    if n == 2:
        return [vmin, vmax]
    k = n - 2
    mid = (n * mean - vmin - vmax) / k
    span = min(mid - vmin, vmax - mid)
    step = span / (2 * k)
    middles = [mid + (j - (k - 1) / 2) * step for j in range(k)]
    return [vmin] + middles + [vmax]


def main():
    table = EscalationTable.from_csv(DATA / "escalation.csv")
    rows = []
    ref = 0

    def add(rtype, readiness, kind, year, factor, target):
        nonlocal ref
        ref += 1
        rows.append({
            "source_id": f"ref{ref:03d}",
            "reactor_type": rtype,
            "readiness": readiness,
            "value_kind": kind,
            "currency": "USD",
            "currency_year": year,
            "amount": repr(target / factor),
        })

    for (rtype, readiness), (n, mean, vmin, vmax) in OCC_STATS.items():
        for i, target in enumerate(target_values(n, mean, vmin, vmax)):
            year = OCC_YEARS[i % len(OCC_YEARS)]
            add(rtype, readiness, "OCC_per_kW", year, table.combined(year), target)

    for (rtype, readiness), values in OM_VALUES.items():
        for i, target in enumerate(values):
            year = OM_YEARS[i % len(OM_YEARS)]
            add(rtype, readiness, "OM_variable_per_MWh", year, table.inflation(year), target)

    for (rtype, readiness), values in FUEL_VALUES.items():
        for i, target in enumerate(values):
            year = OM_YEARS[i % len(OM_YEARS)]
            add(rtype, readiness, "fuel_per_MWh", year, table.inflation(year), target)

    out = DATA / "cost_records.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "source_id", "reactor_type", "readiness", "value_kind",
            "currency", "currency_year", "amount",
        ])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} records to {out}")


if __name__ == "__main__":
    main()
