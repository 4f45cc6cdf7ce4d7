"""Translate an EnergySystem into a linear program.

Variable families, in declaration order:
  cap[tech,region]                  new capacity, MW (electric MW for reactors)
  gen[tech,region,block]            conversion activity, MWh of primary output
  gen[ntech,region,block,carrier]   reactor output per carrier, MWh
  sE[sto,region] / sP[sto,region]   storage energy (MWh) / power (MW) build
  lvl/chg/dis[sto,region,block]     storage state, MWh per block
  flow[corridor,dir,block]          corridor flow, MWh sent
  trx[corridor,i]                   tranche expansion, MW
  imp[route,block]                  imported energy, MWh

Balances are >= demand (free disposal); all energy quantities are MWh per
weighted block, i.e. power sustained over the hours the block represents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costs import FinancingTerms, annuity_factor
from .lp import GE, LE, EQ, BuildError, LPProblem
from .system import EnergySystem

KW_PER_MW = 1000.0


@dataclass
class SystemLP:
    """LPProblem plus the index maps tying columns back to system objects."""

    system: EnergySystem
    lp: LPProblem = field(default_factory=lambda: LPProblem(name="atomgrid"))
    cap: dict = field(default_factory=dict)        # (tech_id, region) -> col
    gen: dict = field(default_factory=dict)        # (tech_id, region, block) -> col
    ngen: dict = field(default_factory=dict)       # (tech_id, region, block, carrier) -> col
    sto_ecap: dict = field(default_factory=dict)   # (sto_id, region) -> col
    sto_pcap: dict = field(default_factory=dict)
    sto_level: dict = field(default_factory=dict)  # (sto_id, region, block) -> col
    sto_charge: dict = field(default_factory=dict)
    sto_discharge: dict = field(default_factory=dict)
    flow: dict = field(default_factory=dict)       # (corridor_id, dir, block) -> col
    tranche: dict = field(default_factory=dict)    # (corridor_id, i) -> col
    imp: dict = field(default_factory=dict)        # (route_id, block) -> col


CORRIDOR_CARRIER = {"HVAC": "electricity", "HVDC": "electricity", "H2pipeline": "hydrogen"}


def declare_variables(slp: SystemLP) -> None:
    sys, lp = slp.system, slp.lp
    blocks = range(sys.grid.n_blocks)
    for t in sys.conversion_techs:
        for r in sys.regions:
            slp.cap[(t.id, r.id)] = lp.add_variable(f"cap[{t.id},{r.id}]")
    for t in sys.nuclear_techs:
        for r in sys.regions:
            slp.cap[(t.id, r.id)] = lp.add_variable(f"cap[{t.id},{r.id}]")
    for t in sys.conversion_techs:
        for r in sys.regions:
            for b in blocks:
                slp.gen[(t.id, r.id, b)] = lp.add_variable(f"gen[{t.id},{r.id},{b}]")
    for t in sys.nuclear_techs:
        for r in sys.regions:
            for b in blocks:
                for carrier in ("electricity", *t.heat_outputs):
                    slp.ngen[(t.id, r.id, b, carrier)] = lp.add_variable(
                        f"gen[{t.id},{r.id},{b},{carrier}]"
                    )
    for s in sys.storage_techs:
        for r in sys.regions:
            slp.sto_ecap[(s.id, r.id)] = lp.add_variable(f"sE[{s.id},{r.id}]")
            slp.sto_pcap[(s.id, r.id)] = lp.add_variable(f"sP[{s.id},{r.id}]")
    for s in sys.storage_techs:
        for r in sys.regions:
            for b in blocks:
                slp.sto_level[(s.id, r.id, b)] = lp.add_variable(f"lvl[{s.id},{r.id},{b}]")
                slp.sto_charge[(s.id, r.id, b)] = lp.add_variable(f"chg[{s.id},{r.id},{b}]")
                slp.sto_discharge[(s.id, r.id, b)] = lp.add_variable(f"dis[{s.id},{r.id},{b}]")
    for k in sys.corridors:
        for direction in ("fwd", "bwd"):
            for b in blocks:
                slp.flow[(k.id, direction, b)] = lp.add_variable(f"flow[{k.id},{direction},{b}]")
    for k in sys.corridors:
        for i in range(len(k.tranches)):
            slp.tranche[(k.id, i)] = lp.add_variable(f"trx[{k.id},{i}]")
    for route in sys.limits.import_routes:
        for b in blocks:
            slp.imp[(route.id, b)] = lp.add_variable(f"imp[{route.id},{b}]")


def add_balance_constraints(slp: SystemLP) -> int:
    """Per (region, carrier, block): supply - consumption >= demand."""
    sys, lp = slp.system, slp.lp
    n_blocks = sys.grid.n_blocks
    terms: dict[tuple[str, str, int], list] = {
        (r.id, c.id, b): []
        for r in sys.regions
        for c in sys.carriers
        for b in range(n_blocks)
    }
    for t in sys.conversion_techs:
        out_ratios = [(c, t.output_ratio(c)) for c in t.outputs]
        in_shares = [(c, t.input_per_primary(c)) for c in t.inputs]
        for r in sys.regions:
            for b in range(n_blocks):
                col = slp.gen[(t.id, r.id, b)]
                for c, ratio in out_ratios:
                    terms[(r.id, c, b)].append((col, ratio))
                for c, share in in_shares:
                    terms[(r.id, c, b)].append((col, -share))
    for t in sys.nuclear_techs:
        for r in sys.regions:
            for b in range(n_blocks):
                for carrier in ("electricity", *t.heat_outputs):
                    terms[(r.id, carrier, b)].append(
                        (slp.ngen[(t.id, r.id, b, carrier)], 1.0)
                    )
    for s in sys.storage_techs:
        for r in sys.regions:
            for b in range(n_blocks):
                terms[(r.id, s.carrier, b)].append((slp.sto_discharge[(s.id, r.id, b)], 1.0))
                terms[(r.id, s.carrier, b)].append((slp.sto_charge[(s.id, r.id, b)], -1.0))
    for k in sys.corridors:
        carrier = CORRIDOR_CARRIER[k.kind]
        delivered = 1.0 - k.loss
        for b in range(n_blocks):
            fwd = slp.flow[(k.id, "fwd", b)]
            bwd = slp.flow[(k.id, "bwd", b)]
            terms[(k.from_region, carrier, b)].append((fwd, -1.0))
            terms[(k.to_region, carrier, b)].append((fwd, delivered))
            terms[(k.to_region, carrier, b)].append((bwd, -1.0))
            terms[(k.from_region, carrier, b)].append((bwd, delivered))
    for route in sys.limits.import_routes:
        for b in range(n_blocks):
            terms[(route.region, route.carrier, b)].append((slp.imp[(route.id, b)], 1.0))

    count = 0
    for r in sys.regions:
        for c in sys.carriers:
            demand = sys.demand_array(r.id, c.id)
            for b in range(n_blocks):
                lp.add_row(f"bal[{c.id},{r.id},{b}]", GE, demand[b], terms[(r.id, c.id, b)])
                count += 1
    return count


def add_conversion_capacity_constraints(slp: SystemLP) -> int:
    """Activity limited by built plus pre-existing capacity and availability."""
    sys, lp = slp.system, slp.lp
    w = sys.grid.weight
    count = 0
    for t in sys.conversion_techs:
        avail = sys.availability(t)
        for r in sys.regions:
            cap_col = slp.cap[(t.id, r.id)]
            existing = t.existing_cap.get(r.id, 0.0)
            for b in range(sys.grid.n_blocks):
                cap_mwh = avail[b] * w
                lp.add_row(
                    f"use[{t.id},{r.id},{b}]", LE, existing * cap_mwh,
                    [(slp.gen[(t.id, r.id, b)], 1.0), (cap_col, -cap_mwh)],
                )
                count += 1
    return count


def add_nuclear_cogeneration_constraints(slp: SystemLP) -> int:
    """Joint output frontier: electricity plus heat (discounted by the
    thermal bonus) within the capacity-factor-derated energy per block."""
    sys, lp = slp.system, slp.lp
    w = sys.grid.weight
    count = 0
    for t in sys.nuclear_techs:
        heat_coef = 1.0 / t.heat_bonus
        for r in sys.regions:
            cap_col = slp.cap[(t.id, r.id)]
            for b in range(sys.grid.n_blocks):
                terms = [(slp.ngen[(t.id, r.id, b, "electricity")], 1.0)]
                terms += [
                    (slp.ngen[(t.id, r.id, b, h)], heat_coef) for h in t.heat_outputs
                ]
                terms.append((cap_col, -t.capacity_factor * w))
                lp.add_row(f"cog[{t.id},{r.id},{b}]", LE, 0.0, terms)
                count += 1
    return count


def add_storage_constraints(slp: SystemLP) -> int:
    """Cyclic level dynamics plus energy/power capacity limits."""
    sys, lp = slp.system, slp.lp
    n, w = sys.grid.n_blocks, sys.grid.weight
    count = 0
    for s in sys.storage_techs:
        keep = 1.0 - s.self_discharge
        for r in sys.regions:
            ecap = slp.sto_ecap[(s.id, r.id)]
            pcap = slp.sto_pcap[(s.id, r.id)]
            for b in range(n):
                nxt = (b + 1) % n
                lp.add_row(
                    f"sbal[{s.id},{r.id},{b}]", EQ, 0.0,
                    [
                        (slp.sto_level[(s.id, r.id, nxt)], 1.0),
                        (slp.sto_level[(s.id, r.id, b)], -keep),
                        (slp.sto_charge[(s.id, r.id, b)], -s.eff_charge),
                        (slp.sto_discharge[(s.id, r.id, b)], 1.0 / s.eff_discharge),
                    ],
                )
                lp.add_row(
                    f"slim[{s.id},{r.id},{b}]", LE, 0.0,
                    [(slp.sto_level[(s.id, r.id, b)], 1.0), (ecap, -1.0)],
                )
                lp.add_row(
                    f"scap[{s.id},{r.id},{b}]", LE, 0.0,
                    [(slp.sto_charge[(s.id, r.id, b)], 1.0), (pcap, -w)],
                )
                lp.add_row(
                    f"sdis[{s.id},{r.id},{b}]", LE, 0.0,
                    [(slp.sto_discharge[(s.id, r.id, b)], 1.0), (pcap, -w)],
                )
                count += 4
            if r.id in s.potential_max:
                lp.add_row(
                    f"spot[{s.id},{r.id}]", LE, s.potential_max[r.id], [(ecap, 1.0)]
                )
                count += 1
    return count


def add_transmission_expansion(slp: SystemLP) -> int:
    """Flow capacity from existing plus tranche investments; tranche caps."""
    sys, lp = slp.system, slp.lp
    w = sys.grid.weight
    count = 0
    for k in sys.corridors:
        tranche_cols = [slp.tranche[(k.id, i)] for i in range(len(k.tranches))]
        for i, (limit, _) in enumerate(k.tranches):
            lp.add_row(f"trlim[{k.id},{i}]", LE, limit, [(tranche_cols[i], 1.0)])
            count += 1
        for direction in ("fwd", "bwd"):
            for b in range(sys.grid.n_blocks):
                terms = [(slp.flow[(k.id, direction, b)], 1.0)]
                terms += [(col, -w) for col in tranche_cols]
                lp.add_row(
                    f"fcap[{k.id},{direction},{b}]", LE, k.existing_cap * w, terms
                )
                count += 1
    return count


def add_resource_limits(slp: SystemLP) -> int:
    """Capacity potentials, the system-wide biomass cap, import route caps."""
    sys, lp = slp.system, slp.lp
    count = 0
    for t in sys.conversion_techs:
        for r in sys.regions:
            if r.id in t.potential_max:
                lp.add_row(
                    f"pot[{t.id},{r.id}]", LE, t.potential_max[r.id],
                    [(slp.cap[(t.id, r.id)], 1.0)],
                )
                count += 1
    for t in sys.nuclear_techs:
        for r in sys.regions:
            if r.id in t.potential_max:
                lp.add_row(
                    f"pot[{t.id},{r.id}]", LE, t.potential_max[r.id],
                    [(slp.cap[(t.id, r.id)], 1.0)],
                )
                count += 1
    biomass_terms = []
    for t in sys.conversion_techs:
        if "biomass" in t.inputs:
            share = t.input_per_primary("biomass")
            for r in sys.regions:
                for b in range(sys.grid.n_blocks):
                    biomass_terms.append((slp.gen[(t.id, r.id, b)], share))
    if biomass_terms:
        lp.add_row("biomass_total", LE, sys.limits.biomass_total_max, biomass_terms)
        count += 1
    for route in sys.limits.import_routes:
        if np.isfinite(route.max_energy):
            lp.add_row(
                f"impcap[{route.id}]", LE, route.max_energy,
                [(slp.imp[(route.id, b)], 1.0) for b in range(sys.grid.n_blocks)],
            )
            count += 1
    return count


def build_objective(slp: SystemLP) -> None:
    """Annualized capex on builds, variable cost on energy, import prices."""
    sys, lp = slp.system, slp.lp
    for t in sys.conversion_techs:
        capex = t.annualized_capex * KW_PER_MW
        varcost = t.om_var + t.fuel
        for r in sys.regions:
            lp.add_objective(slp.cap[(t.id, r.id)], capex)
            if varcost:
                for b in range(sys.grid.n_blocks):
                    lp.add_objective(slp.gen[(t.id, r.id, b)], varcost)
    for t in sys.nuclear_techs:
        if t.annualized_capex is None or t.om_var is None or t.fuel is None:
            raise BuildError(f"nuclear technology {t.id} has no cost assigned; apply a scenario")
        varcost = t.om_var + t.fuel
        for r in sys.regions:
            lp.add_objective(slp.cap[(t.id, r.id)], t.annualized_capex * KW_PER_MW)
            for b in range(sys.grid.n_blocks):
                for carrier in ("electricity", *t.heat_outputs):
                    lp.add_objective(slp.ngen[(t.id, r.id, b, carrier)], varcost)
    for s in sys.storage_techs:
        for r in sys.regions:
            lp.add_objective(slp.sto_ecap[(s.id, r.id)], s.energy_capex * KW_PER_MW)
            lp.add_objective(slp.sto_pcap[(s.id, r.id)], s.power_capex * KW_PER_MW)
    crf = annuity_factor(
        FinancingTerms(
            construction_years=1,
            wacc=sys.infra_financing.wacc,
            lifetime_years=sys.infra_financing.lifetime_years,
        )
    )
    for k in sys.corridors:
        for i, (_, capex_per_mw) in enumerate(k.tranches):
            lp.add_objective(slp.tranche[(k.id, i)], capex_per_mw * crf)
    for route in sys.limits.import_routes:
        for b in range(sys.grid.n_blocks):
            lp.add_objective(slp.imp[(route.id, b)], route.price)


def build_lp(system: EnergySystem) -> SystemLP:
    """Full LP for one scenario-applied system."""
    slp = SystemLP(system=system)
    declare_variables(slp)
    add_balance_constraints(slp)
    add_conversion_capacity_constraints(slp)
    add_nuclear_cogeneration_constraints(slp)
    add_storage_constraints(slp)
    add_transmission_expansion(slp)
    add_resource_limits(slp)
    build_objective(slp)
    return slp
