# conftest.py
import os

import pytest

from src.assign.models import EquilibriumConfig
from src.assign.solver import solve
from src.matchgen.pool import build_sequence_pool
from src.netio.costs import PT_CONGESTED
from src.netio.illustrative import DRIVER_OD, PASSENGER_ODS, illustrative_demands, illustrative_network, illustrative_params
from src.netio.models import Link, Network

RESOURCES = os.path.join(os.path.dirname(__file__), "resources")


def two_route_network(route_b_time: float = 7.5, bpr_alpha: float = 0.15) -> Network:
    """Routes 1-2-4 and 1-3-4, each link capacity 100."""
    links = [
        Link(tail=1, head=2, capacity=100, length=4, free_flow_time=5, bpr_alpha=bpr_alpha),
        Link(tail=2, head=4, capacity=100, length=4, free_flow_time=5, bpr_alpha=bpr_alpha),
        Link(tail=1, head=3, capacity=100, length=6, free_flow_time=route_b_time, bpr_alpha=bpr_alpha),
        Link(tail=3, head=4, capacity=100, length=6, free_flow_time=route_b_time, bpr_alpha=bpr_alpha),
    ]
    return Network(nodes=[1, 2, 3, 4], links=links)


@pytest.fixture(scope="session")
def illustrative():
    return illustrative_network()


@pytest.fixture(scope="session")
def illustrative_pool(illustrative):
    return build_sequence_pool(illustrative, [DRIVER_OD], PASSENGER_ODS, capacity=2, max_passengers=2, detour_factor=3.0)


def illustrative_config(**kwargs) -> EquilibriumConfig:
    return EquilibriumConfig(mode_params=illustrative_params(), pt_time=PT_CONGESTED, mode_choice=False,
                             max_inner=500, max_outer=5, **kwargs)


@pytest.fixture(scope="session")
def illustrative_solution(illustrative, illustrative_pool):
    return solve(illustrative, illustrative_demands(), illustrative_pool, illustrative_config())


@pytest.fixture
def make_two_route():
    return two_route_network


@pytest.fixture
def resources_dir():
    return RESOURCES


@pytest.fixture
def illustrative_settings():
    return illustrative_config()
