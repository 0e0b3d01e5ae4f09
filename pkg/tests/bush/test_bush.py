import numpy as np
import pytest

from src.bush import StaleLabelsError, UnreachableNodeError
from src.bush.bush import build_initial_bush, set_labels, trace_route, update_bush
from src.bush.routes import sequence_routes
from src.matchgen.models import TaskKind
from src.matchgen.sequences import build_sequence
from src.netio.models import Link, Network

P, D = TaskKind.PICKUP, TaskKind.DROPOFF
FREE = np.array([5.0, 5.0, 7.5, 7.5])


def test_initial_bush_is_the_shortest_tree(make_two_route):
    net = make_two_route()
    bush = build_initial_bush(net, 1, FREE, destinations=[4])
    assert sorted(bush.link_pairs()) == [(1, 2), (1, 3), (2, 4)]
    assert bush.labels.min_cost[net.node_index[4]] == pytest.approx(10.0)
    assert bush.is_acyclic()


def test_chain_labels(make_two_route):
    net = make_two_route()
    bush = build_initial_bush(net, 1, FREE, destinations=[4])
    route = trace_route(net, bush.labels, 4)
    assert route.nodes(net) == [1, 2, 4]
    assert route.cost(FREE) == pytest.approx(10.0)


def test_two_node_bush():
    net = Network(nodes=[1, 2], links=[Link(tail=1, head=2, capacity=10, length=1, free_flow_time=2)])
    bush = build_initial_bush(net, 1, np.array([2.0]), destinations=[2])
    assert bush.labels.min_cost.tolist() == [0.0, 2.0]
    assert trace_route(net, bush.labels, 2).links == [0]


def test_unreachable_destination():
    net = Network(nodes=[1, 2, 3], links=[Link(tail=1, head=2, capacity=10, length=1, free_flow_time=2)])
    with pytest.raises(UnreachableNodeError) as e:
        build_initial_bush(net, 1, np.array([2.0]), destinations=[3])
    assert e.value.node == 3


def test_unknown_root(make_two_route):
    with pytest.raises(UnreachableNodeError):
        build_initial_bush(make_two_route(), 9, FREE)


def test_non_positive_costs_rejected(make_two_route):
    with pytest.raises(ValueError):
        build_initial_bush(make_two_route(), 1, np.array([5.0, 0.0, 7.5, 7.5]))


class TestUpdateBush:
    """Bush updates on the two-route network, rooted at node 1."""

    def setup_method(self):
        self.net = Network(nodes=[1, 2, 3, 4], links=[
            Link(tail=1, head=2, capacity=100, length=4, free_flow_time=5),
            Link(tail=2, head=4, capacity=100, length=4, free_flow_time=5),
            Link(tail=1, head=3, capacity=100, length=6, free_flow_time=7.5),
            Link(tail=3, head=4, capacity=100, length=6, free_flow_time=7.5),
        ])
        self.bush = build_initial_bush(self.net, 1, FREE, destinations=[4])

    def test_diamond_min_and_max_labels(self):
        update_bush(self.bush, np.ones(4), np.array([5.0, 20.0, 7.5, 7.5]))
        assert self.bush.mask.all()

        labels = set_labels(self.bush, FREE, supports={"od": np.ones(4)})
        cost, pred = labels.max_for("od")
        assert labels.min_cost[self.net.node_index[4]] == pytest.approx(10.0)
        assert cost[self.net.node_index[4]] == pytest.approx(15.0)
        assert trace_route(self.net, labels, 4, pred).nodes(self.net) == [1, 3, 4]

    def test_key_without_flow_reads_min_labels(self):
        labels = set_labels(self.bush, FREE, supports={"idle": np.zeros(4)})
        cost, _ = labels.max_for("idle")
        assert cost is labels.min_cost

    def test_adds_improving_link(self):
        update_bush(self.bush, np.array([10.0, 10.0, 0.0, 0.0]), np.array([5.0, 20.0, 7.5, 7.5]))
        assert (3, 4) in self.bush.link_pairs()
        assert self.bush.labels.min_cost[self.net.node_index[4]] == pytest.approx(15.0)
        assert trace_route(self.net, self.bush.labels, 4).nodes(self.net) == [1, 3, 4]
        assert self.bush.is_acyclic()

    def test_drops_unused_link_but_keeps_reachability(self):
        update_bush(self.bush, np.ones(4), np.array([5.0, 20.0, 7.5, 7.5]))
        update_bush(self.bush, np.array([10.0, 10.0, 0.0, 0.0]), FREE)
        assert sorted(self.bush.link_pairs()) == [(1, 2), (1, 3), (2, 4)]
        assert self.bush.contains(3)


def test_illustrative_bush_stays_acyclic(illustrative):
    costs = np.full(illustrative.num_links, 5.0)
    bush = build_initial_bush(illustrative, 1, costs, destinations=[16])
    assert bush.labels.min_cost[illustrative.node_index[16]] == pytest.approx(50.0)
    rng = np.random.default_rng(7)
    for _ in range(5):
        update_bush(bush, np.zeros(illustrative.num_links), costs * rng.uniform(0.5, 1.5, illustrative.num_links))
        assert bush.is_acyclic()


def _level_labels(network, seq, costs):
    out = {}
    for level in range(1, seq.num_levels + 1):
        o, d = seq.level_od(level)
        if o != d:
            out[level] = build_initial_bush(network, o, costs, destinations=[d]).labels
    return out


def test_sequence_route_chains_levels(illustrative):
    costs = np.full(illustrative.num_links, 5.0)
    seq = build_sequence((1, 16), [(P, (4, 10)), (P, (7, 13)), (D, (4, 10)), (D, (7, 13))])
    out = sequence_routes(seq, illustrative, _level_labels(illustrative, seq, costs))
    assert out.min_cost == pytest.approx(50.0)
    assert out.max_cost == pytest.approx(50.0)
    assert [len(r.links) for r in out.min_route.routes] == [2, 2, 2, 2, 2]


def test_sequence_route_with_virtual_level(illustrative):
    costs = np.full(illustrative.num_links, 5.0)
    seq = build_sequence((1, 16), [(P, (4, 10)), (P, (4, 10)), (D, (4, 10)), (D, (4, 10))])
    out = sequence_routes(seq, illustrative, _level_labels(illustrative, seq, costs))
    assert out.min_route.routes[1].links == [] and out.min_route.routes[3].links == []
    assert out.min_cost == pytest.approx(50.0)


def test_stale_labels_rejected(illustrative):
    costs = np.full(illustrative.num_links, 5.0)
    seq = build_sequence((1, 16), [])
    with pytest.raises(StaleLabelsError):
        sequence_routes(seq, illustrative, _level_labels(illustrative, seq, costs), version=3)


def test_improving_link_against_the_order_is_added():
    links = [Link(tail=t, head=h, capacity=10, length=1, free_flow_time=1) for t, h in ((1, 2), (1, 3), (3, 2), (2, 3))]
    net = Network(nodes=[1, 2, 3], links=links)
    bush = build_initial_bush(net, 1, np.ones(4))
    assert sorted(bush.link_pairs()) == [(1, 2), (1, 3)]

    update_bush(bush, np.zeros(4), np.array([10.0, 1.0, 1.0, 1.0]))
    assert sorted(bush.link_pairs()) == [(1, 2), (1, 3), (3, 2)]
    assert bush.is_acyclic()
    assert bush.pending == 0
    assert bush.labels.min_cost[net.node_index[2]] == pytest.approx(2.0)
