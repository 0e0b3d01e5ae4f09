import numpy as np
import pytest

from src.assign.matching import PlatformProjector, update_matching
from src.assign.models import EquilibriumConfig
from src.assign.problem import RD, Problem
from src.matchgen.models import SequencePool, TaskKind
from src.matchgen.sequences import build_sequence
from src.netio.models import DemandTable
from src.share.modes import Mode

P, D = TaskKind.PICKUP, TaskKind.DROPOFF


@pytest.fixture
def one_sequence(illustrative):
    seq = build_sequence((1, 16), [(P, (4, 10)), (D, (4, 10))]).copy(update={"r_value": 20.0})
    pool = SequencePool(sequences=[seq], by_driver={(1, 16): [0]})
    demands = {
        Mode.RD: DemandTable(demands={(1, 16): 10.0}),
        Mode.RP: DemandTable(demands={(4, 10): 10.0}),
    }
    return Problem(illustrative, demands, pool, EquilibriumConfig())


def test_step_is_projected_onto_demand(one_sequence):
    projector = PlatformProjector(one_sequence)
    Z, norm = update_matching(projector, np.array([7.0]), np.array([1.0]), one_sequence.initial_q, 5.0)
    assert Z[0] == pytest.approx(10.0, abs=1e-4)
    assert norm == pytest.approx(3.0, abs=1e-4)


def test_zero_saving_keeps_quotas(one_sequence):
    projector = PlatformProjector(one_sequence)
    Z, norm = update_matching(projector, np.array([7.0]), np.array([0.0]), one_sequence.initial_q, 5.0)
    assert Z[0] == 7.0
    assert norm == 0.0


def test_shrinking_driver_demand_cuts_quota(one_sequence):
    projector = PlatformProjector(one_sequence)
    q = one_sequence.initial_q.copy()
    q[one_sequence.od_index[(1, 16)], RD] = 6.0
    Z, _ = update_matching(projector, np.array([10.0]), np.array([0.0]), q, 1.0)
    assert Z[0] == pytest.approx(6.0, abs=1e-4)
    assert projector.feasible(Z, q)


def test_non_finite_objective_rejected(one_sequence):
    projector = PlatformProjector(one_sequence)
    with pytest.raises(ValueError):
        update_matching(projector, np.array([1.0]), np.array([np.nan]), one_sequence.initial_q, 1.0)


def test_repair_scales_round_off_back_inside(one_sequence):
    projector = PlatformProjector(one_sequence)
    Z = projector.repair(np.array([10.000001]), one_sequence.initial_q)
    assert Z[0] <= 10.0
