"""Small named LPs used for solver cross-checks and demos."""

from __future__ import annotations

from .lp import EQ, GE, LE, LPProblem


def single_tech_dispatch(capex: float = 100.0) -> LPProblem:
    """One technology, one 2-hour block at full availability, 4 MWh demand.

    Optimum builds 2 MW and runs them flat: objective = 2 * capex.
    """
    lp = LPProblem(name="single_tech")
    cap = lp.add_variable("cap", cost=capex)
    gen = lp.add_variable("gen")
    lp.add_row("balance", GE, 4.0, [(gen, 1.0)])
    lp.add_row("capacity", LE, 0.0, [(gen, 1.0), (cap, -2.0)])
    return lp


def infeasible_demand() -> LPProblem:
    """Positive demand with no technology able to serve it."""
    lp = LPProblem(name="infeasible_demand")
    lp.add_variable("idle", cost=1.0)
    lp.add_row("balance", GE, 4.0, [])
    return lp


def two_tech_crossover() -> LPProblem:
    """Cheap technology capped below demand; both get built.

    min g1 + 2 g2  s.t. g1 + g2 >= 10, g1 <= 4  ->  (4, 6), objective 16.
    """
    lp = LPProblem(name="two_tech")
    g1 = lp.add_variable("gen_cheap", cost=1.0)
    g2 = lp.add_variable("gen_dear", cost=2.0)
    lp.add_row("demand", GE, 10.0, [(g1, 1.0), (g2, 1.0)])
    lp.add_row("potential", LE, 4.0, [(g1, 1.0)])
    return lp


def unbounded_credit() -> LPProblem:
    """Reward without limit: min -x with only an upper bound on -x."""
    lp = LPProblem(name="unbounded")
    x = lp.add_variable("x", cost=-1.0)
    lp.add_row("noop", LE, 5.0, [(x, -1.0)])
    return lp


def beale_cycling() -> LPProblem:
    """Beale's degenerate example; cycles under naive Dantzig pricing.

    Optimum -0.05 at x = (1/25, 0, 1, 0).
    """
    lp = LPProblem(name="beale")
    x1 = lp.add_variable("x1", cost=-0.75)
    x2 = lp.add_variable("x2", cost=150.0)
    x3 = lp.add_variable("x3", cost=-0.02)
    x4 = lp.add_variable("x4", cost=6.0)
    lp.add_row("r1", LE, 0.0, [(x1, 0.25), (x2, -60.0), (x3, -1.0 / 25.0), (x4, 9.0)])
    lp.add_row("r2", LE, 0.0, [(x1, 0.5), (x2, -90.0), (x3, -1.0 / 50.0), (x4, 3.0)])
    lp.add_row("r3", LE, 1.0, [(x3, 1.0)])
    return lp


def equality_mix() -> LPProblem:
    """Equality plus inequality rows with a redundant duplicate."""
    lp = LPProblem(name="equality_mix")
    a = lp.add_variable("a", cost=3.0)
    b = lp.add_variable("b", cost=5.0)
    lp.add_row("fix", EQ, 7.0, [(a, 1.0), (b, 1.0)])
    lp.add_row("fix_dup", EQ, 7.0, [(a, 1.0), (b, 1.0)])
    lp.add_row("floor", GE, 2.0, [(b, 1.0)])
    return lp


def toy_lps() -> dict[str, LPProblem]:
    return {
        "single_tech": single_tech_dispatch(),
        "infeasible_demand": infeasible_demand(),
        "two_tech": two_tech_crossover(),
        "unbounded": unbounded_credit(),
        "beale": beale_cycling(),
        "equality_mix": equality_mix(),
    }
