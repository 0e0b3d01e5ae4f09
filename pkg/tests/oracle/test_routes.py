import pytest

from src.matchgen.models import TaskKind
from src.matchgen.sequences import build_sequence
from src.oracle import EmptyRouteSetError, RouteBudgetError
from src.oracle.routes import enumerate_paths, enumerate_sequence_routes, incidence

P, D = TaskKind.PICKUP, TaskKind.DROPOFF


@pytest.fixture
def n1():
    return build_sequence((1, 16), [(P, (4, 10)), (P, (7, 13)), (D, (4, 10)), (D, (7, 13))])


def test_four_paths_per_diamond(illustrative):
    paths = enumerate_paths(illustrative, 1, 4)
    assert len(paths) == 4
    assert [len(p) for p in paths] == [2, 2, 3, 3]


def test_sequence_route_count(illustrative, n1):
    assert enumerate_sequence_routes(n1, illustrative).count == 4 ** 5
    assert enumerate_sequence_routes(n1, illustrative, hop_limit=2).count == 2 ** 5


def test_virtual_level_has_one_empty_path(illustrative):
    seq = build_sequence((1, 16), [(P, (4, 10)), (P, (4, 10)), (D, (4, 10)), (D, (4, 10))])
    routes = enumerate_sequence_routes(seq, illustrative)
    assert routes.paths[2] == [[]]
    assert routes.sizes == (4, 1, 16, 1, 16)
    assert len(list(routes.routes())) == routes.count


def test_hop_limit_below_shortest_path(illustrative):
    with pytest.raises(EmptyRouteSetError):
        enumerate_paths(illustrative, 1, 16, hop_limit=3)


def test_route_budget(illustrative, n1):
    with pytest.raises(RouteBudgetError) as e:
        enumerate_sequence_routes(n1, illustrative, budget=100)
    assert e.value.estimate > 100


def test_incidence_counts_link_use(illustrative):
    paths = enumerate_paths(illustrative, 1, 4)
    M = incidence(paths, illustrative.num_links)
    assert M.shape == (4, illustrative.num_links)
    assert M.sum(axis=1).A1.tolist() == [2.0, 2.0, 3.0, 3.0]
