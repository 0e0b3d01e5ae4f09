import numpy as np
import pytest

from src.assign import InvariantViolation
from src.assign.modalcosts import generalized_costs
from src.assign.models import EquilibriumConfig, EquilibriumSolution
from src.assign.problem import RD, RP
from src.assign.solver import raise_on_violations, solve
from src.matchgen.models import SequencePool
from src.netio.models import DemandTable, ModeCoefficients, ModeCostParams
from src.oracle.verify import verify_solution
from src.share.modes import Mode

N1 = "(1,4,7,10,13,16)"


def _n1(solution):
    return next(i for i, s in enumerate(solution.problem.sequences) if s.label() == N1)


def test_two_passenger_sequence_carries_all_passengers(illustrative_solution):
    F = illustrative_solution.state.F
    n1 = _n1(illustrative_solution)
    assert F[n1] == pytest.approx(20000.0, rel=1e-2)
    assert F.sum() == pytest.approx(20000.0, rel=2e-2)


def test_matched_and_quitting_drivers_pay_the_same(illustrative_solution):
    problem = illustrative_solution.problem
    w = problem.od_index[(1, 16)]
    evaluation = illustrative_solution.evaluations[w]
    n1 = _n1(illustrative_solution)
    option = next(o for o in evaluation.options if o.sequence_id == n1)
    quit = evaluation.options[-1]

    assert option.rd_cost == pytest.approx(310.0, rel=1e-2)
    assert quit.min_cost == pytest.approx(370.0, rel=1e-2)
    assert quit.flow == pytest.approx(20000.0, rel=1e-2)
    generalized = generalized_costs(evaluation)
    assert generalized[evaluation.options.index(option)] == pytest.approx(370.0, rel=1e-2)
    for od, cost in option.slot_costs:
        assert cost == pytest.approx(108.0, rel=1e-2)


def test_illustrative_modal_costs(illustrative_solution):
    problem = illustrative_solution.problem
    cost = illustrative_solution.modal_costs.cost
    assert cost[problem.od_index[(1, 16)], RD] == pytest.approx(370.0, rel=1e-2)
    assert cost[problem.od_index[(4, 10)], RP] == pytest.approx(108.0, rel=1e-2)


def test_every_used_link_carries_twice_capacity(illustrative_solution):
    state = illustrative_solution.state
    used = state.x_veh > 100.0
    assert np.allclose(state.x_veh[used], 20000.0, rtol=1e-2)
    times = illustrative_solution.snapshot.times
    assert np.allclose(times[used], 17.0, rtol=2e-2)


def test_illustrative_run_keeps_invariants(illustrative_solution):
    assert illustrative_solution.invariant_violations == []
    raise_on_violations(illustrative_solution)
    assert illustrative_solution.forest.all_acyclic()


def test_illustrative_convergence_contract(illustrative_solution):
    assert illustrative_solution.converged
    assert illustrative_solution.inner_iterations <= 500
    assert illustrative_solution.outer_iterations <= 5
    last = illustrative_solution.last_gap
    assert last.g_m <= 1e-2
    assert last.g_n <= 1e-2
    assert last.al_ratio <= 5e-3
    assert last.g_n <= illustrative_solution.gaps[0].g_n


def test_zero_demand_returns_empty_solution(make_two_route):
    solution = solve(make_two_route(), DemandTable())
    assert solution.converged
    assert solution.state.q.size == 0
    assert solution.inner_iterations == 0


def test_two_route_user_equilibrium(make_two_route):
    network = make_two_route()
    config = EquilibriumConfig(mode_params=ModeCostParams(DA=ModeCoefficients(alpha=1.0)), max_inner=300)
    solution = solve(network, {Mode.DA: DemandTable(demands={(1, 4): 200.0})}, None, config)
    assert solution.converged
    times = solution.snapshot.times
    assert times[0] + times[1] == pytest.approx(times[2] + times[3], rel=1e-2)
    x = solution.state.x_veh
    assert x[0] + x[2] == pytest.approx(200.0)


def test_baseline_without_sequences_uses_two_modes(make_two_route):
    solution = solve(make_two_route(), DemandTable(demands={(1, 4): 200.0}), SequencePool(),
                     EquilibriumConfig(max_inner=300))
    q = solution.state.q
    assert q[0, RD] == 0.0 and q[0, RP] == 0.0
    assert q[0].sum() == pytest.approx(200.0)


def test_violations_raise(make_two_route):
    solution = solve(make_two_route(), DemandTable())
    broken = EquilibriumSolution(state=solution.state, al=solution.al, invariant_violations=["inner 1: negative q"])
    with pytest.raises(InvariantViolation):
        raise_on_violations(broken)


def test_config_rejects_unknown_refresh():
    with pytest.raises(ValueError):
        EquilibriumConfig(cost_refresh="sometimes")


def _time_only_two_route(make_two_route, **kwargs):
    network = make_two_route()
    config = EquilibriumConfig(mode_params=ModeCostParams(DA=ModeCoefficients(alpha=1.0)), max_inner=300, **kwargs)
    return network, {Mode.DA: DemandTable(demands={(1, 4): 200.0})}, config


def test_initial_load_is_not_taken_for_an_equilibrium(make_two_route):
    network, demands, config = _time_only_two_route(make_two_route)
    solution = solve(network, demands, None, config)
    # all-or-nothing on 1-2-4 costs 34 against 15 on 1-3-4
    assert solution.gaps[0].g_n > config.epsilon_n
    assert solution.inner_iterations > 0
    assert solution.converged
    assert solution.forest.pending() == 0
    x = solution.state.x_veh
    assert x[2] == pytest.approx(62.6, abs=2.0)
    report = verify_solution(solution.problem, solution.state, 1e-2, solution.snapshot)
    assert report.residuals["wardrop"].value <= 1e-2, report.format()


def test_warm_start_resumes_at_equilibrium(make_two_route):
    network, demands, config = _time_only_two_route(make_two_route)
    cold = solve(network, demands, None, config)
    warm = solve(network, demands, None, config, warm_start=cold)
    assert not cold.warm_started
    assert warm.warm_started
    assert warm.converged
    assert warm.inner_iterations == 0
    assert warm.state.x_veh.tolist() == pytest.approx(cold.state.x_veh.tolist())


def test_warm_start_from_another_instance_is_ignored(make_two_route):
    network, demands, config = _time_only_two_route(make_two_route)
    cold = solve(network, demands, None, config)
    other = {Mode.DA: DemandTable(demands={(1, 4): 200.0, (1, 2): 50.0})}
    solution = solve(network, other, None, config, warm_start=cold)
    assert not solution.warm_started
    assert solution.state.x_veh[0] >= 50.0
