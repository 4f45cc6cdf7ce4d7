import numpy as np
import pytest

from atomgrid.lp import GE, LE, LPProblem
from atomgrid.solver import (
    BackendUnavailableError,
    SizeGuardError,
    Solution,
    VerificationError,
    solve_backend,
    solve_reference,
    verify_optimality,
)
from atomgrid.toys import toy_lps

from oracle_vertex import oracle_solve


def test_single_tech_analytic():
    lp = toy_lps()["single_tech"]
    sol = solve_reference(lp)
    assert sol.status == "Optimal"
    assert sol.objective == pytest.approx(200.0, rel=1e-9)
    assert sol.variables()["cap"] == pytest.approx(2.0, rel=1e-9)


def test_infeasible_without_techs():
    sol = solve_reference(toy_lps()["infeasible_demand"])
    assert sol.status == "Infeasible"


def test_two_tech_crossover_vertex():
    lp = toy_lps()["two_tech"]
    sol = solve_reference(lp)
    status, obj = oracle_solve(lp)
    assert sol.status == status == "Optimal"
    assert sol.objective == pytest.approx(obj, abs=1e-9)
    assert sol.variables()["gen_cheap"] == pytest.approx(4.0, rel=1e-9)
    assert sol.variables()["gen_dear"] == pytest.approx(6.0, rel=1e-9)


def test_unbounded_detected():
    assert solve_reference(toy_lps()["unbounded"]).status == "Unbounded"


def test_beale_degeneracy_terminates():
    sol = solve_reference(toy_lps()["beale"])
    assert sol.status == "Optimal"
    assert sol.objective == pytest.approx(-0.05, abs=1e-9)


def test_redundant_equality_rows():
    sol = solve_reference(toy_lps()["equality_mix"])
    assert sol.status == "Optimal"
    # a = 5, b = 2 is the cheap split of a + b = 7 with b >= 2
    assert sol.objective == pytest.approx(3 * 5 + 5 * 2, rel=1e-9)


def test_size_guard():
    lp = LPProblem()
    for i in range(11):
        lp.add_variable(f"x{i}", cost=1.0)
    lp.add_row("r", GE, 1.0, [(0, 1.0)])
    with pytest.raises(SizeGuardError, match="backend"):
        solve_reference(lp, max_vars=10)


def test_determinism():
    lp = toy_lps()["beale"]
    a = solve_reference(lp)
    b = solve_reference(lp)
    assert a.objective == b.objective
    assert np.array_equal(a.x, b.x)


def test_duals_satisfy_strong_duality():
    lp = toy_lps()["two_tech"]
    sol = solve_reference(lp)
    report = verify_optimality(lp, sol)
    assert report.duality_gap <= 1e-9
    assert report.primal_residual <= 1e-9


def test_scale_covariance():
    lp = toy_lps()["two_tech"]
    base = solve_reference(lp)
    scaled = solve_reference(lp.scaled_objective(7.5))
    assert scaled.objective == pytest.approx(7.5 * base.objective, rel=1e-9)
    assert np.allclose(scaled.x, base.x)


# ---------------------------------------------------------------------------
# random corpus vs the vertex oracle
# ---------------------------------------------------------------------------


def random_lp(rng: np.random.Generator) -> LPProblem:
    n = int(rng.integers(2, 7))
    m = int(rng.integers(1, 7))
    lp = LPProblem(name="rand")
    for j in range(n):
        lp.add_variable(f"x{j}", cost=float(np.round(rng.normal(0, 3), 3)))
    for i in range(m):
        coeffs = rng.normal(0, 2, size=n)
        coeffs[rng.random(n) < 0.3] = 0.0
        coeffs = np.round(coeffs, 3)
        if not np.any(coeffs):
            coeffs[int(rng.integers(0, n))] = 1.0
        sense = (LE, GE, "=")[int(rng.integers(0, 3))]
        rhs = float(np.round(rng.normal(0, 5), 3))
        lp.add_row(f"r{i}", sense, rhs, list(enumerate(coeffs)))
    return lp


def test_random_corpus_against_oracle():
    rng = np.random.default_rng(20240817)
    statuses = {"Optimal": 0, "Infeasible": 0, "Unbounded": 0}
    for _ in range(40):
        lp = random_lp(rng)
        sol = solve_reference(lp)
        status, obj = oracle_solve(lp)
        assert sol.status == status, f"{lp.name}: {sol.status} vs oracle {status}"
        if status == "Optimal":
            assert sol.objective == pytest.approx(obj, abs=1e-8 * (1 + abs(obj)))
        statuses[status] += 1
    # the seed must actually exercise all three outcomes
    assert all(v > 0 for v in statuses.values()), statuses


# ---------------------------------------------------------------------------
# backends
# ---------------------------------------------------------------------------


def test_scipy_backend_matches_reference():
    for name, lp in toy_lps().items():
        ref = solve_reference(lp)
        alt = solve_backend(lp, "scipy")
        assert alt.status == ref.status, name
        if ref.status == "Optimal":
            assert alt.objective == pytest.approx(ref.objective, rel=1e-6)
            verify_optimality(lp, alt)


def test_unknown_backend():
    with pytest.raises(BackendUnavailableError, match="not registered"):
        solve_backend(toy_lps()["two_tech"], "cplex_enterprise")


def test_malformed_options_rejected_before_dispatch():
    with pytest.raises(ValueError, match="options"):
        solve_backend(toy_lps()["two_tech"], "scipy", options={"threads": 64})


def test_env_var_selects_default_backend(monkeypatch):
    monkeypatch.setenv("ATOMGRID_SOLVER", "reference")
    sol = solve_backend(toy_lps()["two_tech"])
    assert sol.solver == "reference"


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def test_verify_flags_perturbed_primal():
    lp = toy_lps()["two_tech"]
    sol = solve_reference(lp)
    bad = Solution(
        status="Optimal", objective=sol.objective, x=sol.x.copy(),
        duals=sol.duals, var_names=sol.var_names, row_names=sol.row_names,
    )
    bad.x = bad.x + np.array([1.0, 0.0])  # breaks the potential row
    with pytest.raises(VerificationError, match="potential|infeasib"):
        verify_optimality(lp, bad)


def test_verify_flags_zeroed_duals():
    lp = toy_lps()["two_tech"]
    sol = solve_reference(lp)
    bad = Solution(
        status="Optimal", objective=sol.objective, x=sol.x,
        duals=np.zeros_like(sol.duals), var_names=sol.var_names,
        row_names=sol.row_names,
    )
    with pytest.raises(VerificationError):
        verify_optimality(lp, bad)


def test_verify_requires_optimal_status():
    lp = toy_lps()["two_tech"]
    with pytest.raises(VerificationError, match="Infeasible"):
        verify_optimality(lp, Solution(status="Infeasible"))
