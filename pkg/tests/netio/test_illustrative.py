from src.netio.illustrative import illustrative_demands, illustrative_network
from src.share.modes import Mode


def test_diamond_chain_size():
    network = illustrative_network()
    assert network.num_nodes == 16
    assert network.num_links == 50
    assert all(link.free_flow_time == 5.0 and link.length == 5.0 and link.capacity == 10000.0 for link in network.links)


def test_links_come_in_both_directions():
    pairs = {(l.tail, l.head) for l in illustrative_network().links}
    assert all((h, t) in pairs for t, h in pairs)
    assert (6, 5) in pairs and (5, 6) in pairs


def test_fixed_demands():
    demands = illustrative_demands()
    assert demands[Mode.RD].demands == {(1, 16): 40000.0}
    assert demands[Mode.RP].demands == {(4, 10): 20000.0, (7, 13): 20000.0}
    assert demands[Mode.DA].total() == 0.0
