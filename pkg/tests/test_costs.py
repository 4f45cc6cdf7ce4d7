import math

import pytest
from hypothesis import given, strategies as st

from atomgrid import data_path
from atomgrid.costs import (
    CostRecord,
    EscalationRangeError,
    EscalationTable,
    FinancingTerms,
    LearningSpec,
    MissingCostDataError,
    TechCostSet,
    annuity_factor,
    build_full_cost_set,
    build_tech_cost_set,
    convert_usd2019_to_eur2020,
    escalate_to_base_year,
    idc_multiplier,
    load_cost_records,
    noak_from_foak,
)

# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def learning_oracle_doublings(foak, x, doublings):
    """Iterated multiplication: one (1-x) factor per whole doubling."""
    cost = foak
    for _ in range(doublings):
        cost *= 1.0 - x
    return cost


def idc_oracle(T, r):
    """Spend 1/T at the end of each year, compound each tranche to year T."""
    return sum((1.0 / T) * (1.0 + r) ** (T - y) for y in range(1, T + 1))


def annuity_oracle(L, r, tol=1e-12):
    """Bisect for the payment that amortizes a unit debt over L years."""

    def residual(payment):
        debt = 1.0
        for _ in range(L):
            debt = debt * (1.0 + r) - payment
        return debt

    lo, hi = 0.0, 2.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if residual(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def table():
    return EscalationTable.from_csv(data_path("escalation.csv"))


@pytest.fixture(scope="module")
def records():
    return load_cost_records(data_path("cost_records.csv"))


def rec(amount, year, kind="OCC_per_kW", rtype="LWR", readiness="FOAK"):
    return CostRecord(
        source_id="t", reactor_type=rtype, readiness=readiness,
        value_kind=kind, amount=amount, currency_year=year,
    )


# ---------------------------------------------------------------------------
# escalation and conversion
# ---------------------------------------------------------------------------


def test_escalate_2010_combined(table):
    assert escalate_to_base_year(rec(1000.0, 2010), table, use_combined=True) == pytest.approx(1250.0)


def test_escalate_base_year_identity(table):
    assert escalate_to_base_year(rec(1000.0, 2019), table, use_combined=True) == 1000.0
    assert escalate_to_base_year(rec(1000.0, 2019), table, use_combined=False) == 1000.0


def test_escalate_2022_deflates(table):
    assert escalate_to_base_year(rec(1000.0, 2022), table, use_combined=True) == pytest.approx(750.0)


def test_escalate_year_out_of_range(table):
    with pytest.raises(EscalationRangeError, match="1977"):
        escalate_to_base_year(rec(1.0, 1977), table)


def test_escalation_table_requires_unit_base_factor():
    with pytest.raises(ValueError):
        EscalationTable(rows={2019: (1.01, 1.0)})


@given(st.floats(1.0, 1e6), st.sampled_from([1978, 1995, 2007, 2010, 2021, 2022]))
def test_escalate_inverse_roundtrip(amount, year):
    table = EscalationTable.from_csv(data_path("escalation.csv"))
    forward = escalate_to_base_year(rec(amount, year), table, use_combined=True)
    back = forward / table.combined(year)
    assert back == pytest.approx(amount, rel=1e-12)


def test_convert_zero():
    assert convert_usd2019_to_eur2020(0.0) == 0.0


def test_convert_thousand():
    assert convert_usd2019_to_eur2020(1000.0) == pytest.approx(905.40, abs=0.01)


def test_convert_lwr_foak_occ():
    assert convert_usd2019_to_eur2020(5622.9) == pytest.approx(5091.0, abs=0.1)


# ---------------------------------------------------------------------------
# learning curve
# ---------------------------------------------------------------------------


def test_noak_zero_learning():
    for n in (1.0, 2.0, 10.0, 1024.0):
        assert noak_from_foak(LearningSpec(10000.0, 0.0, n)) == 10000.0


def test_noak_power_of_two():
    spec = LearningSpec(10000.0, 0.10, 8.0)
    assert noak_from_foak(spec) == pytest.approx(learning_oracle_doublings(10000.0, 0.10, 3), rel=1e-12)
    assert noak_from_foak(spec) == pytest.approx(7290.0, rel=1e-12)


def test_noak_fractional_doublings():
    # oracle: exp/log form evaluated independently of the implementation's **
    d = math.log(10.0) / math.log(2.0)
    expected = 10000.0 * math.exp(d * math.log(0.9))
    got = noak_from_foak(LearningSpec(10000.0, 0.10, 10.0))
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(7046.9, abs=0.1)


def test_noak_rejects_full_learning():
    with pytest.raises(ValueError):
        LearningSpec(10000.0, 1.0, 4.0)


@given(
    st.floats(0.001, 0.5),
    st.floats(1.0, 1e5),
    st.floats(1.0, 1e5),
)
def test_noak_monotone_in_n(x, n1, n2):
    lo, hi = sorted((n1, n2))
    c_lo = noak_from_foak(LearningSpec(1000.0, x, lo))
    c_hi = noak_from_foak(LearningSpec(1000.0, x, hi))
    assert c_hi <= c_lo + 1e-9
    assert noak_from_foak(LearningSpec(1000.0, x, 1.0)) == pytest.approx(1000.0, rel=1e-12)


# ---------------------------------------------------------------------------
# financing factors
# ---------------------------------------------------------------------------


def test_idc_single_year():
    assert idc_multiplier(FinancingTerms(construction_years=1, wacc=0.10)) == 1.0


def test_idc_zero_rate():
    assert idc_multiplier(FinancingTerms(construction_years=7, wacc=0.0)) == 1.0


def test_idc_reference_case():
    terms = FinancingTerms(construction_years=7, wacc=0.10)
    assert idc_multiplier(terms) == pytest.approx(idc_oracle(7, 0.10), rel=1e-12)
    assert idc_multiplier(terms) == pytest.approx(1.35531, abs=1e-4)


@given(st.integers(1, 30), st.integers(1, 30), st.floats(0.001, 0.3), st.floats(0.001, 0.3))
def test_idc_monotone(T1, T2, r1, r2):
    t_lo, t_hi = sorted((T1, T2))
    r_lo, r_hi = sorted((r1, r2))
    f = lambda T, r: idc_multiplier(FinancingTerms(construction_years=T, wacc=r))
    assert f(t_lo, r_lo) >= 1.0
    if t_lo < t_hi:
        assert f(t_hi, r_lo) > f(t_lo, r_lo)
    if r_hi - r_lo > 1e-6 and t_lo > 1:
        assert f(t_lo, r_hi) > f(t_lo, r_lo)


def test_annuity_zero_rate_is_straight_line():
    assert annuity_factor(FinancingTerms(lifetime_years=40, wacc=0.0)) == 0.025


def test_annuity_single_period():
    assert annuity_factor(FinancingTerms(lifetime_years=1, wacc=0.10)) == pytest.approx(1.1, rel=1e-12)


def test_annuity_reference_case():
    terms = FinancingTerms(lifetime_years=40, wacc=0.10)
    assert annuity_factor(terms) == pytest.approx(annuity_oracle(40, 0.10), abs=1e-9)
    assert annuity_factor(terms) == pytest.approx(0.102259, abs=1e-5)


@given(st.integers(1, 60), st.floats(0.0, 0.3))
def test_annuity_times_lifetime_at_least_one(L, r):
    product = annuity_factor(FinancingTerms(lifetime_years=L, wacc=r)) * L
    if r == 0.0:
        assert product == pytest.approx(1.0, rel=1e-12)
    else:
        assert product > 1.0 - 1e-12


# ---------------------------------------------------------------------------
# aggregation into TechCostSet
# ---------------------------------------------------------------------------


def test_bundled_records_reproduce_published_occ(records, table):
    terms = FinancingTerms()
    cs = build_full_cost_set(records, terms, table=table)
    assert cs.get("SFR", "FOAK").occ == pytest.approx(9511.47, abs=1e-6)
    assert cs.get("LWR", "NOAK_min").occ == pytest.approx(1782.62, abs=1e-6)
    assert cs.get("HTR", "NOAK_mean").occ == pytest.approx(5649.65, abs=1e-6)
    assert cs.get("SMR", "FOAK").occ == pytest.approx(9241.42, abs=1e-6)


def test_bundled_records_reproduce_published_om_and_fuel(records, table):
    cs = build_full_cost_set(records, FinancingTerms(), table=table)
    assert cs.get("LWR", "FOAK").om == pytest.approx(27.03, abs=1e-9)
    assert cs.get("LWR", "FOAK").fuel == pytest.approx(11.9, abs=1e-9)
    assert cs.get("SFR", "NOAK_mean").om == pytest.approx(19.93, abs=1e-9)
    assert cs.get("HTR", "NOAK_min").om == pytest.approx(3.13, abs=1e-9)
    assert cs.get("SMR", "NOAK_min").fuel == pytest.approx(9.16, abs=1e-9)


def test_single_record_collapses_stats(table):
    recs = [
        rec(5000.0, 2019, rtype="SFR", readiness="NOAK"),
        rec(10.0, 2019, kind="OM_variable_per_MWh", rtype="SFR", readiness="NOAK"),
        rec(9.0, 2019, kind="fuel_per_MWh", rtype="SFR", readiness="NOAK"),
    ]
    cs = build_tech_cost_set(recs, FinancingTerms(), "NOAK_mean", table=table, types=("SFR",))
    tc = cs.get("SFR", "NOAK_mean")
    assert tc.occ == tc.occ_min == tc.occ_max == 5000.0


def test_annualized_capex_composition():
    """occ * idc * annuity, checked against the two factor oracles."""
    terms = FinancingTerms(construction_years=7, wacc=0.10, lifetime_years=40)
    recs = [
        rec(5622.9, 2019),
        rec(27.03, 2019, kind="OM_variable_per_MWh"),
        rec(11.9, 2019, kind="fuel_per_MWh"),
    ]
    cs = build_tech_cost_set(recs, terms, "FOAK", types=("LWR",))
    expected = 5622.9 * idc_oracle(7, 0.10) * annuity_oracle(40, 0.10)
    assert cs.get("LWR", "FOAK").annualized_capex == pytest.approx(expected, abs=1e-6)
    assert cs.get("LWR", "FOAK").annualized_capex == pytest.approx(779.3, abs=0.5)


def test_fixed_om_folds_through_capacity_factor():
    """184.72 /kW-yr at 90% availability plus 3.6 /MWh lands on 27.03."""
    recs = [
        rec(5622.9, 2019),
        rec(184.72, 2019, kind="OM_fixed_per_kW_yr"),
        rec(3.6, 2019, kind="OM_variable_per_MWh"),
        rec(11.9, 2019, kind="fuel_per_MWh"),
    ]
    cs = build_tech_cost_set(recs, FinancingTerms(), "FOAK", types=("LWR",))
    assert cs.get("LWR", "FOAK").om == pytest.approx(27.03, abs=0.01)


def test_missing_type_reports_gap(table):
    recs = [
        rec(5000.0, 2019),
        rec(10.0, 2019, kind="OM_variable_per_MWh"),
        rec(9.0, 2019, kind="fuel_per_MWh"),
    ]
    with pytest.raises(MissingCostDataError, match="SFR/FOAK"):
        build_tech_cost_set(recs, FinancingTerms(), "FOAK", types=("LWR", "SFR"))


def test_stats_ordering(records, table):
    cs = build_full_cost_set(records, FinancingTerms(), table=table)
    for tc in cs.entries.values():
        assert tc.occ_min <= tc.occ_max
        # the stored occ is a mean or a min depending on level; always in range
        assert tc.occ_min - 1e-9 <= tc.occ <= tc.occ_max + 1e-9


def test_cost_set_json_roundtrip(records, table, tmp_path):
    cs = build_full_cost_set(records, FinancingTerms(), table=table)
    path = tmp_path / "costs.json"
    cs.write_json(path)
    back = TechCostSet.read_json(path)
    assert back.entries.keys() == cs.entries.keys()
    for key in cs.entries:
        assert back.entries[key].occ == cs.entries[key].occ
        assert back.entries[key].annualized_capex == cs.entries[key].annualized_capex
