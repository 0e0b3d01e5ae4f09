import numpy as np
import pytest

from src.assign.solver import solve
from src.matchgen.models import SequencePool
from src.netio.costs import PT_CONGESTED
from src.netio.illustrative import illustrative_demands, illustrative_params
from src.netio.models import DemandTable, ModeCoefficients, ModeCostParams
from src.oracle import OracleSizeError
from src.oracle.msa import brute_force_equilibrium, platform_lp
from src.share.modes import Mode

N1 = "(1,4,7,10,13,16)"


def test_two_route_user_equilibrium(make_two_route):
    time_only = ModeCostParams(DA=ModeCoefficients(alpha=1.0))
    result = brute_force_equilibrium(make_two_route(), {Mode.DA: DemandTable(demands={(1, 4): 200.0})}, params=time_only)
    t = result.times
    assert t[0] + t[1] == pytest.approx(t[2] + t[3], rel=1e-2)
    assert result.x_veh[0] + result.x_veh[2] == pytest.approx(200.0)


def test_no_demand_means_no_flow(make_two_route):
    result = brute_force_equilibrium(make_two_route(), {Mode.DA: DemandTable()})
    assert np.all(result.x_veh == 0.0)
    assert result.F.size == 0


def test_platform_lp_prefers_larger_saving():
    A_rd = np.array([[1.0, 1.0]])
    A_rp = np.array([[1.0, 1.0]])
    Z = platform_lp(np.array([40.0, 10.0]), A_rd, A_rp, np.array([50.0]), np.array([30.0]))
    assert Z.tolist() == pytest.approx([30.0, 0.0], abs=1e-6)


def test_pool_size_limit(illustrative, illustrative_pool):
    with pytest.raises(OracleSizeError):
        brute_force_equilibrium(illustrative, illustrative_demands(), illustrative_pool)


@pytest.mark.slow
def test_matches_bush_solver_on_illustrative(illustrative, illustrative_pool, illustrative_settings):
    seq = next(s for s in illustrative_pool.sequences if s.label() == N1)
    pool = SequencePool(sequences=[seq.copy(update={"id": 0})], by_driver={(1, 16): [0]})
    solution = solve(illustrative, illustrative_demands(), pool, illustrative_settings)
    result = brute_force_equilibrium(illustrative, illustrative_demands(), pool, illustrative_params(),
                                     pt_time=PT_CONGESTED, Z=solution.state.Z, hop_limit=2)
    assert result.F[0] == pytest.approx(solution.state.F[0], rel=1e-2)
    assert result.F[0] == pytest.approx(20000.0, rel=1e-2)
    assert result.quit_costs[(1, 16)] == pytest.approx(370.0, rel=2e-2)
    assert result.rd_costs[0] == pytest.approx(310.0, rel=2e-2)


def test_default_costs_equalize_generalized_cost(make_two_route):
    network = make_two_route()
    result = brute_force_equilibrium(network, {Mode.DA: DemandTable(demands={(1, 4): 200.0})})
    t = result.times
    lengths = [link.length for link in network.links]
    # alpha = beta = 1: time plus distance
    assert t[0] + t[1] + lengths[0] + lengths[1] == pytest.approx(t[2] + t[3] + lengths[2] + lengths[3], rel=1e-2)
