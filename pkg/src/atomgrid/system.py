"""Domain model and ingestion for the energy system.

Regions, carriers, technologies, storage, transmission corridors, demand
profiles and resource limits are read from a JSON config plus CSV profile
files and validated into an immutable EnergySystem, the structured input
to LP construction.

Internal units: capacity MW, energy MWh, cost EUR/MWh and EUR/kW/yr as
quoted (capex is scaled to per-MW where it meets capacity variables).
Config files use GW / TWh for readability; the loader converts.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

CARRIER_IDS = (
    "electricity",
    "districtHeat",
    "processHeat_low",
    "processHeat_medium",
    "processHeat_high",
    "hydrogen",
    "syntheticMethane",
    "methanol",
    "biomass",
    "spaceHeat",
)

#: Carriers counted as "heat" when reporting nuclear shares.
HEAT_CARRIERS = (
    "districtHeat",
    "processHeat_low",
    "processHeat_medium",
    "processHeat_high",
)

NUCLEAR_IDS = ("LWR", "SMR", "SFR", "HTR")

#: Permitted heat outputs per reactor technology.
NUCLEAR_HEAT_OUTPUTS = {
    "LWR": ("districtHeat",),
    "SMR": ("processHeat_low",),
    "SFR": ("processHeat_medium",),
    "HTR": ("processHeat_medium", "processHeat_high"),
}

CORRIDOR_KINDS = ("HVAC", "HVDC", "H2pipeline")

GW = 1000.0          # MW per GW
TWH = 1_000_000.0    # MWh per TWh
MEUR_PER_GW = 1000.0  # EUR/MW per (million EUR per GW)


class ConfigError(ValueError):
    """Invalid or inconsistent system configuration."""


@dataclass(frozen=True)
class Carrier:
    id: str
    transportable: bool = False


@dataclass(frozen=True)
class Region:
    id: str
    zone: str
    cluster: str


@dataclass(frozen=True)
class TimeGrid:
    """Block-resolved model year.

    ``n_blocks`` blocks of ``block_length_h`` hours of profile data span the
    horizon; each block carries ``weight`` hours of the modeled year, so the
    weights sum to ``annual_hours``. A full-resolution grid has weight equal
    to the block length; a desk-scale grid stretches fewer blocks over the
    year.
    """

    block_length_h: float = 2.0
    n_blocks: int = 4380
    annual_hours: float | None = None

    def __post_init__(self):
        if self.block_length_h <= 0 or self.n_blocks <= 0:
            raise ConfigError("grid: block length and count must be positive")
        if self.annual_hours is None:
            object.__setattr__(self, "annual_hours", self.horizon_hours)

    @property
    def horizon_hours(self) -> float:
        return self.n_blocks * self.block_length_h

    @property
    def weight(self) -> float:
        """Modeled-year hours represented by one block."""
        return self.annual_hours / self.n_blocks

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n_blocks, self.weight)


@dataclass(frozen=True)
class ConversionTech:
    """Technology converting input carriers into output carriers.

    ``outputs`` maps carrier -> efficiency (MWh out per MWh total input);
    ``inputs`` maps carrier -> share of total input. Capacity and activity
    are denominated in the primary output carrier, the first key of
    ``outputs``.
    """

    id: str
    outputs: dict[str, float]
    inputs: dict[str, float] = field(default_factory=dict)
    annualized_capex: float = 0.0     # EUR/kW/yr of primary-output capacity
    om_var: float = 0.0               # EUR/MWh primary output
    fuel: float = 0.0                 # EUR/MWh primary output
    availability: float | str = 1.0   # flat fraction or profile name
    potential_max: dict[str, float] = field(default_factory=dict)  # region -> MW
    existing_cap: dict[str, float] = field(default_factory=dict)   # region -> MW

    @property
    def primary_output(self) -> str:
        return next(iter(self.outputs))

    def output_ratio(self, carrier: str) -> float:
        """MWh of `carrier` per MWh of primary output."""
        return self.outputs[carrier] / self.outputs[self.primary_output]

    def input_per_primary(self, carrier: str) -> float:
        """MWh of input `carrier` consumed per MWh of primary output."""
        return self.inputs[carrier] / self.outputs[self.primary_output]


@dataclass(frozen=True)
class NuclearTech:
    """Cogenerating reactor: electric capacity that can flexibly shift
    output into its permitted heat carriers at a 1.2x thermal bonus."""

    id: str
    heat_outputs: tuple[str, ...]
    heat_bonus: float = 1.2
    capacity_factor: float = 0.9
    annualized_capex: float | None = None  # EUR/kW(el)/yr, set per scenario
    om_var: float | None = None            # EUR/MWh of any output
    fuel: float | None = None              # EUR/MWh of any output
    potential_max: dict[str, float] = field(default_factory=dict)  # region -> MW

    def __post_init__(self):
        if not self.heat_outputs:
            raise ConfigError(f"nuclear tech {self.id}: no heat outputs")
        if self.heat_bonus <= 1.0:
            raise ConfigError(f"nuclear tech {self.id}: heat bonus must exceed 1")
        if not 0.0 < self.capacity_factor <= 1.0:
            raise ConfigError(f"nuclear tech {self.id}: capacity factor outside (0,1]")


@dataclass(frozen=True)
class StorageTech:
    id: str
    carrier: str
    eff_charge: float = 1.0
    eff_discharge: float = 1.0
    energy_capex: float = 0.0   # EUR/kWh/yr of energy capacity
    power_capex: float = 0.0    # EUR/kW/yr of charge/discharge capacity
    self_discharge: float = 0.0  # fraction lost per block
    potential_max: dict[str, float] = field(default_factory=dict)  # region -> MWh

    def __post_init__(self):
        if not 0.0 < self.eff_charge <= 1.0 or not 0.0 < self.eff_discharge <= 1.0:
            raise ConfigError(f"storage {self.id}: efficiencies outside (0,1]")
        if not 0.0 <= self.self_discharge < 1.0:
            raise ConfigError(f"storage {self.id}: self-discharge outside [0,1)")


@dataclass(frozen=True)
class TransmissionCorridor:
    """Bidirectional transfer corridor with tranche-wise expansion."""

    from_region: str
    to_region: str
    kind: str
    existing_cap: float = 0.0                     # MW
    tranches: tuple[tuple[float, float], ...] = ()  # (extra MW, EUR/MW overnight)
    length_km: float = 0.0
    loss_per_1000km: float = 0.0

    def __post_init__(self):
        if self.kind not in CORRIDOR_KINDS:
            raise ConfigError(f"corridor {self.id}: unknown kind {self.kind!r}")
        capexes = [c for _, c in self.tranches]
        if any(b < a for a, b in zip(capexes, capexes[1:])):
            raise ConfigError(f"corridor {self.id}: tranche capex must be nondecreasing")
        for lim, _ in self.tranches:
            if lim <= 0:
                raise ConfigError(f"corridor {self.id}: tranche with nonpositive limit")
        if not 0.0 <= self.loss <= 0.999:
            raise ConfigError(f"corridor {self.id}: loss outside [0,1)")

    @property
    def id(self) -> str:
        return f"{self.kind}:{self.from_region}-{self.to_region}"

    @property
    def loss(self) -> float:
        return self.loss_per_1000km * self.length_km / 1000.0


@dataclass(frozen=True)
class DemandSeries:
    region: str
    carrier: str
    values: np.ndarray  # MWh per block

    def __post_init__(self):
        if np.any(self.values < 0):
            raise ConfigError(f"demand {self.carrier}@{self.region}: negative values")


@dataclass(frozen=True)
class ImportRoute:
    id: str
    carrier: str
    region: str
    price: float      # EUR/MWh
    max_energy: float  # MWh/yr


@dataclass(frozen=True)
class SystemLimits:
    biomass_total_max: float = 0.0  # MWh/yr
    import_routes: tuple[ImportRoute, ...] = ()

    def __post_init__(self):
        if self.biomass_total_max < 0:
            raise ConfigError("limits: biomass cap must be nonnegative")
        for route in self.import_routes:
            if route.price < 0 or route.max_energy < 0:
                raise ConfigError(f"import route {route.id}: negative price or cap")


@dataclass(frozen=True)
class InfraFinancing:
    """Annualization terms for transmission tranche capex."""

    wacc: float = 0.07
    lifetime_years: int = 40


@dataclass(frozen=True)
class ScenarioSpec:
    """One model run: cost readiness level x excluded reactor set."""

    readiness: str
    excluded: frozenset[str] = frozenset()
    grid: TimeGrid | None = None

    def __post_init__(self):
        bad = set(self.excluded) - set(NUCLEAR_IDS)
        if bad:
            raise ConfigError(f"scenario excludes unknown technologies {sorted(bad)}")


@dataclass(frozen=True)
class EnergySystem:
    grid: TimeGrid
    regions: tuple[Region, ...]
    carriers: tuple[Carrier, ...]
    conversion_techs: tuple[ConversionTech, ...]
    nuclear_techs: tuple[NuclearTech, ...]
    storage_techs: tuple[StorageTech, ...]
    corridors: tuple[TransmissionCorridor, ...]
    demands: tuple[DemandSeries, ...]
    limits: SystemLimits
    profiles: dict[str, np.ndarray]
    infra_financing: InfraFinancing = InfraFinancing()
    name: str = "system"

    def carrier_ids(self) -> list[str]:
        return [c.id for c in self.carriers]

    def region_ids(self) -> list[str]:
        return [r.id for r in self.regions]

    def availability(self, tech: ConversionTech) -> np.ndarray:
        if isinstance(tech.availability, str):
            return self.profiles[tech.availability]
        return np.full(self.grid.n_blocks, float(tech.availability))

    def demand_array(self, region: str, carrier: str) -> np.ndarray:
        total = np.zeros(self.grid.n_blocks)
        for d in self.demands:
            if d.region == region and d.carrier == carrier:
                total = total + d.values
        return total

    def fingerprint(self) -> str:
        """Structural identity used to refuse cross-system comparisons."""
        parts = [
            self.name,
            ",".join(self.region_ids()),
            ",".join(self.carrier_ids()),
            ",".join(t.id for t in self.conversion_techs),
            ",".join(t.id for t in self.nuclear_techs),
            ",".join(s.id for s in self.storage_techs),
            f"{self.grid.n_blocks}x{self.grid.block_length_h}",
        ]
        return "|".join(parts)


# ---------------------------------------------------------------------------
# profile handling
# ---------------------------------------------------------------------------


def aggregate_profile(hourly, grid: TimeGrid, mode: str = "mean") -> np.ndarray:
    """Aggregate an hourly series onto the block grid.

    ``mean`` for capacity factors, ``sum`` for energy demands.
    """
    hourly = np.asarray(hourly, dtype=float)
    block = grid.block_length_h
    if block != int(block):
        raise ConfigError(f"cannot aggregate onto fractional block length {block}")
    block = int(block)
    if len(hourly) % block != 0:
        raise ConfigError(
            f"profile length {len(hourly)} not divisible by block length {block}"
        )
    n = len(hourly) // block
    if n != grid.n_blocks:
        raise ConfigError(
            f"profile yields {n} blocks but the grid has {grid.n_blocks}"
        )
    chunks = hourly.reshape(n, block)
    if mode == "mean":
        return chunks.mean(axis=1)
    if mode == "sum":
        return chunks.sum(axis=1)
    raise ConfigError(f"unknown aggregation mode {mode!r}")


def _read_profile_csv(path: Path, grid: TimeGrid, aggregate: str) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2 or header[1].strip() != "value":
            raise ConfigError(f"{path.name}: expected header `block,value` or `hour,value`")
        key = header[0].strip()
        values = [float(row[1]) for row in reader if row]
    arr = np.asarray(values, dtype=float)
    if key == "block":
        if len(arr) != grid.n_blocks:
            raise ConfigError(
                f"profile {path.name}: {len(arr)} blocks, grid expects {grid.n_blocks}"
            )
        return arr
    if key == "hour":
        return aggregate_profile(arr, grid, mode=aggregate)
    raise ConfigError(f"{path.name}: first column must be `block` or `hour`")


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------


def _require(section: dict, key: str, context: str):
    if key not in section:
        raise ConfigError(f"{context}: missing field {key!r}")
    return section[key]


def load_system(config_path: str | Path) -> EnergySystem:
    """Load and validate a system config (JSON + referenced CSV profiles)."""
    config_path = Path(config_path)
    with open(config_path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    base = config_path.parent

    grid_cfg = cfg.get("grid", {})
    grid = TimeGrid(
        block_length_h=float(grid_cfg.get("block_length_h", 2.0)),
        n_blocks=int(grid_cfg.get("n_blocks", 4380)),
        annual_hours=grid_cfg.get("annual_hours"),
    )

    profiles: dict[str, np.ndarray] = {}
    for name, spec in sorted(cfg.get("profiles", {}).items()):
        path = base / _require(spec, "file", f"profile {name}")
        if not path.exists():
            raise ConfigError(f"profile {name}: file {path} not found")
        profiles[name] = _read_profile_csv(path, grid, spec.get("aggregate", "mean"))

    regions = tuple(
        Region(
            id=_require(r, "id", "region"),
            zone=_require(r, "zone", f"region {r.get('id')}"),
            cluster=_require(r, "cluster", f"region {r.get('id')}"),
        )
        for r in cfg.get("regions", [])
    )
    if not regions:
        raise ConfigError("no regions configured")
    region_ids = [r.id for r in regions]
    if len(set(region_ids)) != len(region_ids):
        raise ConfigError("duplicate region ids")

    carriers = tuple(
        Carrier(id=_require(c, "id", "carrier"), transportable=bool(c.get("transportable", False)))
        for c in cfg.get("carriers", [])
    )
    carrier_ids = [c.id for c in carriers]
    if len(set(carrier_ids)) != len(carrier_ids):
        raise ConfigError("duplicate carrier ids")
    unknown = set(carrier_ids) - set(CARRIER_IDS)
    if unknown:
        raise ConfigError(f"unknown carrier ids {sorted(unknown)}")

    def region_map(raw: dict, scale: float, context: str) -> dict[str, float]:
        out = {}
        for rid, val in (raw or {}).items():
            if rid not in region_ids:
                raise ConfigError(f"{context}: unknown region {rid!r}")
            out[rid] = float(val) * scale
        return out

    conv: list[ConversionTech] = []
    nuclear: list[NuclearTech] = []
    for t in cfg.get("technologies", []):
        tid = _require(t, "id", "technology")
        if t.get("kind", "conversion") == "nuclear":
            if tid not in NUCLEAR_IDS:
                raise ConfigError(f"nuclear technology id must be one of {NUCLEAR_IDS}, got {tid!r}")
            nuclear.append(
                NuclearTech(
                    id=tid,
                    heat_outputs=tuple(t.get("heat_outputs", NUCLEAR_HEAT_OUTPUTS[tid])),
                    heat_bonus=float(t.get("heat_bonus", 1.2)),
                    capacity_factor=float(t.get("capacity_factor", 0.9)),
                    potential_max=region_map(t.get("potential_max_gw"), GW, tid),
                )
            )
            for hc in nuclear[-1].heat_outputs:
                if hc not in carrier_ids:
                    raise ConfigError(f"technology {tid}: unknown heat carrier {hc!r}")
        else:
            outputs = {k: float(v) for k, v in _require(t, "outputs", f"technology {tid}").items()}
            inputs = {k: float(v) for k, v in t.get("inputs", {}).items()}
            for cid in list(outputs) + list(inputs):
                if cid not in carrier_ids:
                    raise ConfigError(f"technology {tid}: unknown carrier {cid!r}")
            if any(v <= 0 for v in outputs.values()):
                raise ConfigError(f"technology {tid}: efficiencies must be positive")
            availability = t.get("availability", 1.0)
            if isinstance(availability, str):
                if availability not in profiles:
                    raise ConfigError(f"technology {tid}: unknown profile {availability!r}")
                prof = profiles[availability]
                if np.any((prof < 0) | (prof > 1)):
                    raise ConfigError(f"technology {tid}: availability profile outside [0,1]")
            else:
                availability = float(availability)
                if not 0.0 <= availability <= 1.0:
                    raise ConfigError(f"technology {tid}: availability outside [0,1]")
            conv.append(
                ConversionTech(
                    id=tid,
                    outputs=outputs,
                    inputs=inputs,
                    annualized_capex=float(t.get("annualized_capex_eur_per_kw_yr", 0.0)),
                    om_var=float(t.get("om_var_eur_per_mwh", 0.0)),
                    fuel=float(t.get("fuel_eur_per_mwh", 0.0)),
                    availability=availability,
                    potential_max=region_map(t.get("potential_max_gw"), GW, tid),
                    existing_cap=region_map(t.get("existing_cap_gw"), GW, tid),
                )
            )
    all_tech_ids = [t.id for t in conv] + [t.id for t in nuclear]
    if len(set(all_tech_ids)) != len(all_tech_ids):
        raise ConfigError("duplicate technology ids")
    if not conv and not nuclear:
        raise ConfigError("no supply technologies configured")

    storage = []
    for s in cfg.get("storage", []):
        sid = _require(s, "id", "storage")
        carrier = _require(s, "carrier", f"storage {sid}")
        if carrier not in carrier_ids:
            raise ConfigError(f"storage {sid}: unknown carrier {carrier!r}")
        storage.append(
            StorageTech(
                id=sid,
                carrier=carrier,
                eff_charge=float(s.get("eff_charge", 1.0)),
                eff_discharge=float(s.get("eff_discharge", 1.0)),
                energy_capex=float(s.get("energy_capex_eur_per_kwh_yr", 0.0)),
                power_capex=float(s.get("power_capex_eur_per_kw_yr", 0.0)),
                self_discharge=float(s.get("self_discharge_per_block", 0.0)),
                potential_max=region_map(s.get("potential_max_gwh"), GW, sid),
            )
        )
    if len({s.id for s in storage}) != len(storage):
        raise ConfigError("duplicate storage ids")

    trans_cfg = cfg.get("transmission", {})
    infra = InfraFinancing(
        wacc=float(trans_cfg.get("financing", {}).get("wacc", 0.07)),
        lifetime_years=int(trans_cfg.get("financing", {}).get("lifetime_years", 40)),
    )
    corridors = []
    for k in trans_cfg.get("corridors", []):
        frm = _require(k, "from", "corridor")
        to = _require(k, "to", "corridor")
        for rid in (frm, to):
            if rid not in region_ids:
                raise ConfigError(f"corridor {frm}-{to}: unknown region {rid!r}")
        if frm == to:
            raise ConfigError(f"corridor {frm}-{to}: self-loop")
        corridors.append(
            TransmissionCorridor(
                from_region=frm,
                to_region=to,
                kind=_require(k, "kind", f"corridor {frm}-{to}"),
                existing_cap=float(k.get("existing_cap_gw", 0.0)) * GW,
                tranches=tuple(
                    (float(lim) * GW, float(capex) * MEUR_PER_GW)
                    for lim, capex in k.get("tranches_gw_meur_per_gw", [])
                ),
                length_km=float(k.get("length_km", 0.0)),
                loss_per_1000km=float(k.get("loss_per_1000km", 0.0)),
            )
        )

    demands = []
    for d in cfg.get("demands", []):
        rid = _require(d, "region", "demand")
        cid = _require(d, "carrier", "demand")
        if rid not in region_ids:
            raise ConfigError(f"demand: unknown region {rid!r}")
        if cid not in carrier_ids:
            raise ConfigError(f"demand: unknown carrier {cid!r}")
        prof_name = _require(d, "profile", f"demand {cid}@{rid}")
        if prof_name not in profiles:
            raise ConfigError(f"demand {cid}@{rid}: unknown profile {prof_name!r}")
        values = profiles[prof_name] * float(d.get("annual_twh", 1.0)) * TWH
        demands.append(DemandSeries(region=rid, carrier=cid, values=values))

    lim_cfg = cfg.get("limits", {})
    routes = tuple(
        ImportRoute(
            id=_require(m, "id", "import route"),
            carrier=_require(m, "carrier", "import route"),
            region=_require(m, "region", "import route"),
            price=float(_require(m, "price_eur_per_mwh", "import route")),
            max_energy=float(m.get("max_twh", math.inf)) * TWH,
        )
        for m in lim_cfg.get("import_routes", [])
    )
    for route in routes:
        if route.region not in region_ids:
            raise ConfigError(f"import route {route.id}: unknown region {route.region!r}")
        if route.carrier not in carrier_ids:
            raise ConfigError(f"import route {route.id}: unknown carrier {route.carrier!r}")
    limits = SystemLimits(
        biomass_total_max=float(lim_cfg.get("biomass_total_max_twh", 0.0)) * TWH,
        import_routes=routes,
    )

    return EnergySystem(
        grid=grid,
        regions=regions,
        carriers=carriers,
        conversion_techs=tuple(conv),
        nuclear_techs=tuple(nuclear),
        storage_techs=tuple(storage),
        corridors=tuple(corridors),
        demands=tuple(demands),
        limits=limits,
        profiles=profiles,
        infra_financing=infra,
        name=cfg.get("name", config_path.stem),
    )


# ---------------------------------------------------------------------------
# scenario application
# ---------------------------------------------------------------------------


def apply_scenario(system: EnergySystem, spec: ScenarioSpec, costs) -> EnergySystem:
    """Inject readiness-level nuclear costs and zero out excluded reactors.

    Exclusion pins the capacity bound to zero in every region rather than
    removing the technology, so every run shares one LP shape.
    """
    if not costs.has_level(spec.readiness):
        raise ConfigError(f"cost set lacks readiness level {spec.readiness!r}")
    new_nuclear = []
    for tech in system.nuclear_techs:
        if tech.id in spec.excluded:
            zeroed = {r.id: 0.0 for r in system.regions}
            new_nuclear.append(replace(tech, potential_max=zeroed,
                                       annualized_capex=0.0, om_var=0.0, fuel=0.0))
        else:
            tc = costs.get(tech.id, spec.readiness)
            new_nuclear.append(
                replace(
                    tech,
                    annualized_capex=tc.annualized_capex_eur,
                    om_var=tc.om_eur,
                    fuel=tc.fuel_eur,
                )
            )
    grid = spec.grid if spec.grid is not None else system.grid
    if grid.n_blocks != system.grid.n_blocks:
        raise ConfigError(
            f"scenario grid has {grid.n_blocks} blocks, system profiles have {system.grid.n_blocks}"
        )
    return replace(system, nuclear_techs=tuple(new_nuclear), grid=grid)
