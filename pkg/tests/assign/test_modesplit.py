import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from src.assign.modesplit import cheapest_mode, update_mode_split

DA, RD, RP, PT = 0, 1, 2, 3


def test_costlier_mode_gives_theta_times_gap():
    q = np.array([[100.0, 0.0, 0.0, 100.0]])
    costs = np.array([[40.0, 0.0, 0.0, 10.0]])
    new_q, norm = update_mode_split(q, costs, 1.0, [DA, PT], q.sum(axis=1))
    assert new_q.tolist() == [[70.0, 0.0, 0.0, 130.0]]
    assert norm == pytest.approx(np.sqrt(2) * 30.0)


def test_shift_is_capped_by_the_mode_demand():
    q = np.array([[10.0, 0.0, 0.0, 190.0]])
    costs = np.array([[40.0, 0.0, 0.0, 10.0]])
    new_q, _ = update_mode_split(q, costs, 1.0, [DA, PT], q.sum(axis=1))
    assert new_q[0, DA] == 0.0
    assert new_q[0, PT] == 200.0


def test_equal_costs_leave_split_alone():
    q = np.array([[50.0, 25.0, 25.0, 100.0]])
    costs = np.full((1, 4), 12.0)
    new_q, norm = update_mode_split(q, costs, 1.0, [DA, RD, RP, PT], q.sum(axis=1))
    assert np.allclose(new_q, q)
    assert norm == 0.0


def test_ties_go_to_lowest_mode_index():
    assert cheapest_mode(np.array([5.0, 3.0, 3.0, 4.0]), [DA, RD, RP, PT]) == RD


def test_inactive_modes_are_untouched():
    q = np.array([[100.0, 0.0, 0.0, 100.0]])
    costs = np.array([[40.0, 1.0, 1.0, 10.0]])
    new_q, _ = update_mode_split(q, costs, 1.0, [DA, PT], q.sum(axis=1))
    assert new_q[0, RD] == 0.0 and new_q[0, RP] == 0.0


@settings(max_examples=100, deadline=None)
@given(
    q=arrays(np.float64, (3, 4), elements=st.floats(0, 1000)),
    costs=arrays(np.float64, (3, 4), elements=st.floats(0, 500)),
    theta=st.floats(0.01, 10),
)
def test_split_conserves_demand_and_stays_non_negative(q, costs, theta):
    total = q.sum(axis=1)
    new_q, _ = update_mode_split(q, costs, theta, [DA, RD, RP, PT], total)
    assert np.allclose(new_q.sum(axis=1), total, atol=1e-6)
    assert new_q.min() >= -1e-9
