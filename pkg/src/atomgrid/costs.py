"""Reactor cost normalization and annualization.

Takes heterogeneous literature cost points (overnight construction cost,
fixed/variable O&M, fuel) quoted in assorted years, escalates them to a
common base year, applies learning-curve reductions, and converts
overnight cost into the annualized capital charge the dispatch model
consumes.

All monetary values stay at full float precision; rounding happens only
when reports are written.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path

BASE_YEAR = 2019

# USD-2019 -> EUR-2020: one year of euro inflation, then the exchange rate.
EUR_INFLATION_2019_2020 = 1.014
USD_TO_EUR_RATE = 0.8929

HOURS_PER_YEAR = 8760.0

REACTOR_TYPES = ("LWR", "SMR", "SFR", "HTR", "LFR", "MSR", "MSFR")
#: Reactor technologies the dispatch model actually builds.
MODEL_REACTOR_TYPES = ("LWR", "SMR", "SFR", "HTR")

READINESS = ("FOAK", "NOAK")
#: Cost parameterizations selectable per scenario run.
LEVELS = ("FOAK", "NOAK_mean", "NOAK_min")

VALUE_KINDS = (
    "OCC_per_kW",
    "OM_fixed_per_kW_yr",
    "OM_variable_per_MWh",
    "fuel_per_MWh",
)

CURRENCIES = ("USD", "EUR")


class EscalationRangeError(ValueError):
    """A record's currency year falls outside the escalation table."""


class MissingCostDataError(LookupError):
    """No cost records exist for a requested (type, level, kind) slot."""


@dataclass(frozen=True)
class CostRecord:
    """One literature cost point, as quoted in its source."""

    source_id: str
    reactor_type: str
    readiness: str
    value_kind: str
    amount: float
    currency_year: int
    currency: str = "USD"

    def __post_init__(self):
        if self.reactor_type not in REACTOR_TYPES:
            raise ValueError(f"unknown reactor type {self.reactor_type!r}")
        if self.readiness not in READINESS:
            raise ValueError(f"unknown readiness {self.readiness!r}")
        if self.value_kind not in VALUE_KINDS:
            raise ValueError(f"unknown value kind {self.value_kind!r}")
        if self.currency not in CURRENCIES:
            raise ValueError(f"unknown currency {self.currency!r}")
        if self.amount < 0:
            raise ValueError(f"negative amount {self.amount} in {self.source_id}")


@dataclass(frozen=True)
class EscalationTable:
    """Year -> escalation factors to the base year.

    Two factor columns: plain consumer-price inflation, and a combined
    factor that additionally tracks construction-cost indices. Overnight
    construction cost escalates with the combined factor, O&M and fuel
    with plain inflation.
    """

    rows: dict[int, tuple[float, float]]  # year -> (inflation, combined)
    base_year: int = BASE_YEAR

    def __post_init__(self):
        if self.base_year not in self.rows:
            raise ValueError(f"base year {self.base_year} missing from table")
        infl, comb = self.rows[self.base_year]
        if infl != 1.0 or comb != 1.0:
            raise ValueError("factors at the base year must equal 1.0 exactly")
        for year, (i, c) in self.rows.items():
            if i <= 0 or c <= 0:
                raise ValueError(f"non-positive factor in year {year}")

    def __contains__(self, year: int) -> bool:
        return year in self.rows

    def inflation(self, year: int) -> float:
        self._check(year)
        return self.rows[year][0]

    def combined(self, year: int) -> float:
        self._check(year)
        return self.rows[year][1]

    def _check(self, year: int) -> None:
        if year not in self.rows:
            lo, hi = min(self.rows), max(self.rows)
            raise EscalationRangeError(
                f"year {year} outside escalation table range {lo}..{hi}"
            )

    @classmethod
    def from_csv(cls, path: str | Path, base_year: int = BASE_YEAR) -> "EscalationTable":
        """Read a `year,inflation_factor,combined_factor` CSV."""
        rows: dict[int, tuple[float, float]] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            required = {"year", "inflation_factor", "combined_factor"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValueError(f"{path}: expected columns {sorted(required)}")
            for line in reader:
                rows[int(line["year"])] = (
                    float(line["inflation_factor"]),
                    float(line["combined_factor"]),
                )
        return cls(rows=rows, base_year=base_year)


def load_cost_records(path: str | Path) -> list[CostRecord]:
    """Read the `source_id,reactor_type,readiness,value_kind,currency,currency_year,amount` CSV."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {
            "source_id", "reactor_type", "readiness", "value_kind",
            "currency", "currency_year", "amount",
        }
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {sorted(required)}")
        for line in reader:
            records.append(
                CostRecord(
                    source_id=line["source_id"],
                    reactor_type=line["reactor_type"],
                    readiness=line["readiness"],
                    value_kind=line["value_kind"],
                    currency=line["currency"],
                    currency_year=int(line["currency_year"]),
                    amount=float(line["amount"]),
                )
            )
    return records


def escalate_to_base_year(
    record: CostRecord, table: EscalationTable, use_combined: bool = True
) -> float:
    """Escalate one record's amount to base-year currency.

    Base-year records pass through unchanged (the table pins both factors
    to 1.0 there). EUR records are only acceptable one year past the base
    year, where the fixed inflation/exchange pair defines the mapping back
    to base-year USD; any other EUR year has no defined conversion.
    """
    if record.currency == "EUR":
        if record.currency_year != BASE_YEAR + 1:
            raise EscalationRangeError(
                f"EUR records supported only for year {BASE_YEAR + 1}, "
                f"got {record.currency_year}"
            )
        return record.amount / (EUR_INFLATION_2019_2020 * USD_TO_EUR_RATE)
    factor = (
        table.combined(record.currency_year)
        if use_combined
        else table.inflation(record.currency_year)
    )
    return record.amount * factor


def convert_usd2019_to_eur2020(value_usd: float) -> float:
    """USD-2019 -> EUR-2020: inflate one year, then apply the exchange rate."""
    return value_usd * EUR_INFLATION_2019_2020 * USD_TO_EUR_RATE


@dataclass(frozen=True)
class LearningSpec:
    """Learning-curve inputs: first-unit cost, rate per doubling, unit count."""

    foak_cost: float
    learning_rate_x: float
    units_n: float

    def __post_init__(self):
        if not 0.0 <= self.learning_rate_x < 1.0:
            raise ValueError(f"learning rate {self.learning_rate_x} outside [0, 1)")
        if self.units_n < 1.0:
            raise ValueError(f"units_n {self.units_n} must be >= 1")


def noak_from_foak(spec: LearningSpec) -> float:
    """Cost of the n-th unit: foak * (1 - x) ** log2(n).

    Doublings are real-valued, so any n >= 1 is admissible, not just
    powers of two.
    """
    d = math.log2(spec.units_n)
    return spec.foak_cost * (1.0 - spec.learning_rate_x) ** d


@dataclass(frozen=True)
class FinancingTerms:
    """Capital financing assumptions shared by all reactor types."""

    construction_years: int = 7
    wacc: float = 0.10
    lifetime_years: int = 40
    capacity_factor: float = 0.9

    def __post_init__(self):
        if self.construction_years < 1:
            raise ValueError("construction time must be at least one year")
        if not 0.0 <= self.wacc < 1.0:
            raise ValueError(f"wacc {self.wacc} outside [0, 1)")
        if self.lifetime_years < 1:
            raise ValueError("lifetime must be at least one year")
        if not 0.0 < self.capacity_factor <= 1.0:
            raise ValueError(f"capacity factor {self.capacity_factor} outside (0, 1]")


def idc_multiplier(terms: FinancingTerms) -> float:
    """Interest during construction under uniform end-of-year spending.

    Spending 1/T at the end of each construction year and compounding to
    commissioning gives sum_{y=1..T} (1/T)(1+r)^(T-y) = ((1+r)^T - 1)/(T r),
    which tends to 1 as r -> 0.
    """
    T, r = terms.construction_years, terms.wacc
    if r == 0.0 or T == 1:
        return 1.0
    growth = (1.0 + r) ** T
    if growth == 1.0:  # rate below float resolution
        return 1.0
    return (growth - 1.0) / (T * r)


def annuity_factor(terms: FinancingTerms) -> float:
    """Capital-recovery factor r(1+r)^L / ((1+r)^L - 1); 1/L at r = 0."""
    L, r = terms.lifetime_years, terms.wacc
    if r == 0.0:
        return 1.0 / L
    growth = (1.0 + r) ** L
    if growth == 1.0:  # rate below float resolution
        return 1.0 / L
    return r * growth / (growth - 1.0)


@dataclass(frozen=True)
class TechCost:
    """Normalized cost parameters for one reactor type at one readiness level.

    Monetary fields are base-year USD; the `*_eur` properties apply the
    fixed conversion for model consumption.
    """

    occ: float                # USD/kW
    om: float                 # USD/MWh, fixed+variable combined
    fuel: float               # USD/MWh
    annualized_capex: float   # USD/kW/yr
    occ_min: float = 0.0
    occ_max: float = 0.0

    @property
    def occ_eur(self) -> float:
        return convert_usd2019_to_eur2020(self.occ)

    @property
    def om_eur(self) -> float:
        return convert_usd2019_to_eur2020(self.om)

    @property
    def fuel_eur(self) -> float:
        return convert_usd2019_to_eur2020(self.fuel)

    @property
    def annualized_capex_eur(self) -> float:
        return convert_usd2019_to_eur2020(self.annualized_capex)


@dataclass
class TechCostSet:
    """Per (reactor type, readiness level) normalized cost entries."""

    terms: FinancingTerms
    entries: dict[tuple[str, str], TechCost] = field(default_factory=dict)

    def get(self, reactor_type: str, level: str) -> TechCost:
        try:
            return self.entries[(reactor_type, level)]
        except KeyError:
            raise MissingCostDataError(
                f"no cost entry for {reactor_type} at level {level}"
            ) from None

    def has_level(self, level: str) -> bool:
        return any(lv == level for _, lv in self.entries)

    def levels(self) -> list[str]:
        return sorted({lv for _, lv in self.entries}, key=LEVELS.index)

    def to_json_dict(self) -> dict:
        costs: dict[str, dict] = {}
        for (rtype, level), tc in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            costs.setdefault(level, {})[rtype] = {
                "occ_usd_per_kw": tc.occ,
                "occ_min_usd_per_kw": tc.occ_min,
                "occ_max_usd_per_kw": tc.occ_max,
                "om_usd_per_mwh": tc.om,
                "fuel_usd_per_mwh": tc.fuel,
                "annualized_capex_usd_per_kw_yr": tc.annualized_capex,
                "occ_eur_per_kw": tc.occ_eur,
                "om_eur_per_mwh": tc.om_eur,
                "fuel_eur_per_mwh": tc.fuel_eur,
                "annualized_capex_eur_per_kw_yr": tc.annualized_capex_eur,
            }
        return {
            "schema_version": 1,
            "financing": {
                "construction_years": self.terms.construction_years,
                "wacc": self.terms.wacc,
                "lifetime_years": self.terms.lifetime_years,
                "capacity_factor": self.terms.capacity_factor,
            },
            "costs": costs,
        }

    def write_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, payload: dict) -> "TechCostSet":
        fin = payload["financing"]
        terms = FinancingTerms(
            construction_years=fin["construction_years"],
            wacc=fin["wacc"],
            lifetime_years=fin["lifetime_years"],
            capacity_factor=fin["capacity_factor"],
        )
        out = cls(terms=terms)
        for level, per_type in payload["costs"].items():
            for rtype, vals in per_type.items():
                out.entries[(rtype, level)] = TechCost(
                    occ=vals["occ_usd_per_kw"],
                    om=vals["om_usd_per_mwh"],
                    fuel=vals["fuel_usd_per_mwh"],
                    annualized_capex=vals["annualized_capex_usd_per_kw_yr"],
                    occ_min=vals.get("occ_min_usd_per_kw", 0.0),
                    occ_max=vals.get("occ_max_usd_per_kw", 0.0),
                )
        return out

    @classmethod
    def read_json(cls, path: str | Path) -> "TechCostSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def _readiness_for_level(level: str) -> str:
    if level == "FOAK":
        return "FOAK"
    if level in ("NOAK_mean", "NOAK_min"):
        return "NOAK"
    raise ValueError(f"unknown readiness level {level!r}")


def _level_stat(values: list[float], level: str) -> float:
    return min(values) if level == "NOAK_min" else statistics.fmean(values)


def build_tech_cost_set(
    records: list[CostRecord],
    terms: FinancingTerms,
    level: str,
    table: EscalationTable | None = None,
    types: tuple[str, ...] = MODEL_REACTOR_TYPES,
) -> TechCostSet:
    """Aggregate normalized records into per-type cost parameters for one level.

    When an escalation table is given, records are escalated first (combined
    factor for overnight cost, plain inflation for O&M and fuel); otherwise
    amounts are taken as already normalized to the base year.

    Statistics per level: FOAK and NOAK_mean use the mean over matching
    records, NOAK_min the minimum. Fixed O&M (per kW-yr) folds into the
    per-MWh O&M via the fleet capacity factor. Fuel records are pooled
    across reactor types and applied uniformly, since sources only quote
    fuel for one representative type.
    """
    readiness = _readiness_for_level(level)

    def normalized(rec: CostRecord) -> float:
        if table is None:
            return rec.amount
        return escalate_to_base_year(
            rec, table, use_combined=(rec.value_kind == "OCC_per_kW")
        )

    pool = [r for r in records if r.readiness == readiness]
    by_kind: dict[tuple[str, str], list[float]] = {}
    for rec in pool:
        by_kind.setdefault((rec.reactor_type, rec.value_kind), []).append(normalized(rec))

    fuel_values = [normalized(r) for r in pool if r.value_kind == "fuel_per_MWh"]
    if not fuel_values:
        raise MissingCostDataError(f"no fuel_per_MWh records at level {level}")
    fuel = _level_stat(fuel_values, level)

    idc = idc_multiplier(terms)
    crf = annuity_factor(terms)
    mwh_per_kw_yr = HOURS_PER_YEAR * terms.capacity_factor / 1000.0

    out = TechCostSet(terms=terms)
    missing = []
    for rtype in types:
        occ_values = by_kind.get((rtype, "OCC_per_kW"), [])
        fixed_om = by_kind.get((rtype, "OM_fixed_per_kW_yr"), [])
        var_om = by_kind.get((rtype, "OM_variable_per_MWh"), [])
        if not occ_values:
            missing.append(f"{rtype}/{level}/OCC_per_kW")
            continue
        if not fixed_om and not var_om:
            missing.append(f"{rtype}/{level}/OM")
            continue
        occ = _level_stat(occ_values, level)
        om = 0.0
        if fixed_om:
            om += _level_stat(fixed_om, level) / mwh_per_kw_yr
        if var_om:
            om += _level_stat(var_om, level)
        out.entries[(rtype, level)] = TechCost(
            occ=occ,
            om=om,
            fuel=fuel,
            annualized_capex=occ * idc * crf,
            occ_min=min(occ_values),
            occ_max=max(occ_values),
        )
    if missing:
        raise MissingCostDataError("missing cost data for: " + ", ".join(missing))
    return out


def build_full_cost_set(
    records: list[CostRecord],
    terms: FinancingTerms,
    table: EscalationTable | None = None,
    types: tuple[str, ...] = MODEL_REACTOR_TYPES,
) -> TechCostSet:
    """All three readiness levels merged into one set."""
    out = TechCostSet(terms=terms)
    for level in LEVELS:
        out.entries.update(
            build_tech_cost_set(records, terms, level, table=table, types=types).entries
        )
    return out
