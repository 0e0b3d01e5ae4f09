import numpy as np
import pytest

from src.assign.forest import BushForest
from src.assign.gaps import modal_gap, route_gap
from src.assign.models import EquilibriumConfig, FlowState
from src.assign.options import solo_costs
from src.assign.problem import Problem
from src.netio.models import DemandTable, ModeCoefficients, ModeCostParams
from src.share.modes import Mode


@pytest.fixture
def split_routes(make_two_route):
    """Route costs 10 and 13 with fixed times, 90 trips on the first and 10 on the second."""
    network = make_two_route(route_b_time=6.5, bpr_alpha=0.0)
    problem = Problem(network, {Mode.DA: DemandTable(demands={(1, 4): 100.0})}, None,
                      EquilibriumConfig(mode_params=ModeCostParams(DA=ModeCoefficients(alpha=1.0))))
    E = problem.network.num_links
    state = FlowState(q=problem.initial_q.copy(), Z=np.zeros(0), F=np.zeros(0), level_flows=np.zeros((0, E)),
                      da_flows=np.array([[90.0, 90.0, 10.0, 10.0]]), pt_flows=np.zeros((1, E)), x_veh=np.zeros(E))
    state.recompute_vehicular()
    return problem, state


def test_route_gap_counts_excess_over_cheapest_route(split_routes):
    problem, state = split_routes
    snapshot = problem.cost_model.evaluate(state.x_veh)
    forest = BushForest(problem)
    forest.build_all(snapshot)
    da, pt = solo_costs(problem, forest, snapshot, state)
    assert da[0].min_cost == pytest.approx(10.0)
    assert route_gap(problem, snapshot, state, {}, da, pt) == pytest.approx(0.3)


def test_route_gap_zero_when_all_on_cheapest(split_routes):
    problem, state = split_routes
    state.da_flows[0] = [100.0, 100.0, 0.0, 0.0]
    state.recompute_vehicular()
    snapshot = problem.cost_model.evaluate(state.x_veh)
    forest = BushForest(problem)
    forest.build_all(snapshot)
    da, pt = solo_costs(problem, forest, snapshot, state)
    assert route_gap(problem, snapshot, state, {}, da, pt) == pytest.approx(0.0, abs=1e-12)


def test_modal_gap(make_two_route):
    problem = Problem(make_two_route(), DemandTable(demands={(1, 4): 200.0}), None, EquilibriumConfig())
    q = np.array([[100.0, 0.0, 0.0, 100.0]])
    costs = np.array([[40.0, 0.0, 0.0, 10.0]])
    # 100 trips pay 30 over the cheapest mode
    assert modal_gap(problem, q, costs) == pytest.approx(15.0)


def test_modal_gap_ignored_without_mode_choice(make_two_route):
    config = EquilibriumConfig(mode_choice=False)
    problem = Problem(make_two_route(), DemandTable(demands={(1, 4): 200.0}), None, config)
    q = np.array([[100.0, 0.0, 0.0, 100.0]])
    assert modal_gap(problem, q, np.array([[40.0, 0.0, 0.0, 10.0]])) == 0.0
