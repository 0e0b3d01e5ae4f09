import pytest

from src.assign.models import EquilibriumConfig
from src.assign.problem import DA, Problem
from src.assign.solver import solve
from src.netio.models import DemandTable
from src.oracle.verify import FAMILIES, ResidualReport, verify_solution

TOLERANCE = 1e-2


@pytest.fixture
def solved(illustrative_solution):
    return illustrative_solution


def test_solver_output_passes(solved):
    report = verify_solution(solved.problem, solved.state, TOLERANCE, solved.snapshot)
    assert report.passed(TOLERANCE), report.format()
    assert [r["family"] for r in report.rows()] == FAMILIES


def test_recomputed_snapshot_gives_same_verdict(solved):
    assert verify_solution(solved.problem, solved.state, TOLERANCE).passed(TOLERANCE)


def test_sequence_flow_without_route_flow_breaks_coupling(solved):
    state = solved.state.clone()
    n = int(state.F.argmax())
    state.F[n] *= 1.5
    report = verify_solution(solved.problem, state, TOLERANCE, solved.snapshot)
    assert not report.passed(TOLERANCE)
    assert report.residuals["coupling"].value > TOLERANCE
    assert f"sequence {n}" in report.residuals["coupling"].witness


def test_modal_total_mismatch_breaks_conservation(solved):
    state = solved.state.clone()
    w = solved.problem.od_index[(1, 16)]
    state.q[w, DA] += 8000.0
    report = verify_solution(solved.problem, state, TOLERANCE, solved.snapshot)
    assert report.residuals["conservation"].value == pytest.approx(0.1, rel=1e-6)
    assert report.worst().family in ("conservation", "capacity", "stability", "wardrop")


def test_zero_demand_has_no_residuals(make_two_route):
    solution = solve(make_two_route(), DemandTable())
    problem = Problem(make_two_route(), DemandTable(), None, EquilibriumConfig())
    report = verify_solution(problem, solution.state)
    assert all(r.value == 0.0 for r in report.residuals.values())
    assert report.passed(0.0)


def test_report_keeps_largest_residual():
    report = ResidualReport()
    report.record("wardrop", 0.1, "first")
    report.record("wardrop", 0.05, "second")
    report.record("wardrop", 0.2, "third")
    assert report.worst().witness == "third"
    assert not report.passed(0.15)
