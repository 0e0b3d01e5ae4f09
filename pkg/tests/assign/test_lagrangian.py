import numpy as np
import pytest

from src import config
from src.assign.gaps import al_ratio, al_value
from src.assign.lagrangian import RHO_MAX, update_al
from src.assign.models import ALParams, FlowState, GroupEvaluation, OptionCost


def state(F, Z):
    E = 2
    return FlowState(q=np.zeros((1, 4)), Z=np.array(Z, dtype=float), F=np.array(F, dtype=float),
                     level_flows=np.zeros((1, E)), da_flows=np.zeros((1, E)), pt_flows=np.zeros((1, E)),
                     x_veh=np.zeros(E))


def option(sequence_id, cost):
    return OptionCost(sequence_id=sequence_id, min_cost=cost, max_cost=cost, realized_cost=cost, rd_cost=cost)


def test_satisfied_quota_keeps_zero_multiplier():
    al = ALParams(rho=1.0, mu_tilde=np.zeros(1), outer_iteration=1)
    out = update_al(state([3.0], [5.0]), al)
    assert out.mu_tilde.tolist() == [0.0]
    assert out.outer_iteration == 2


def test_violation_raises_multiplier():
    al = ALParams(rho=1.0, mu_tilde=np.zeros(1), outer_iteration=1)
    out = update_al(state([5.0], [3.0]), al)
    assert out.mu_tilde[0] == pytest.approx(2.0)
    assert out.last_violation_norm == pytest.approx(2.0)


def test_penalty_grows_when_violation_does_not_shrink():
    al = ALParams(rho=1.0, mu_tilde=np.zeros(1), outer_iteration=1, last_violation_norm=1.0)
    out = update_al(state([5.0], [3.0]), al)
    assert out.rho == pytest.approx(config.SIGMA_1)


def test_penalty_kept_when_violation_shrinks_enough():
    al = ALParams(rho=1.0, mu_tilde=np.zeros(1), outer_iteration=1, last_violation_norm=100.0)
    out = update_al(state([5.0], [3.0]), al)
    assert out.rho == 1.0


def test_first_update_seeds_from_costs():
    evaluation = GroupEvaluation(od_index=0, options=[option(0, 100.0), option(None, 120.0)])
    al = ALParams(rho=0.0, mu_tilde=np.zeros(1))
    out = update_al(state([5.0], [3.0]), al, g=10.0, evaluations={0: evaluation}, driver_of=np.array([0]))
    assert out.mu_tilde[0] == pytest.approx(20.0)
    assert out.rho == pytest.approx(5.0)


def test_seeded_penalty_is_clipped():
    evaluation = GroupEvaluation(od_index=0, options=[option(0, 100.0), option(None, 120.0)])
    al = ALParams(rho=0.0, mu_tilde=np.zeros(1))
    out = update_al(state([5.0], [3.0]), al, g=1e6, evaluations={0: evaluation}, driver_of=np.array([0]))
    assert out.rho == RHO_MAX


def test_seed_without_violation_uses_floor():
    al = ALParams(rho=0.0, mu_tilde=np.zeros(1), rho_floor=0.01)
    out = update_al(state([3.0], [3.0]), al, g=1.0, evaluations={}, driver_of=np.array([0]))
    assert out.rho == 0.01
    assert out.mu_tilde[0] == 0.0


def test_penalty_value_and_ratio():
    al = ALParams(rho=2.0, mu_tilde=np.array([1.0]))
    # ((1 + 2*1)^2 - 1^2) / 4
    assert al_value(al, np.array([1.0])) == pytest.approx(2.0)
    assert al_ratio(al, np.array([1.0]), 6.0) == pytest.approx(0.25)
    assert al_ratio(ALParams(mu_tilde=np.zeros(1)), np.zeros(1), 0.0) == 0.0
