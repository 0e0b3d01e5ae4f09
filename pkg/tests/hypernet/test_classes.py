from src.hypernet import RP_QUIT_TAG
from src.hypernet.classes import ClassKind, build_flow_classes, level_ods
from src.hypernet.injections import sequence_demand_vector
from src.matchgen.models import TaskKind
from src.matchgen.sequences import build_sequence
from src.share.modes import CostLayer, Mode

P, D = TaskKind.PICKUP, TaskKind.DROPOFF
A, B = (4, 10), (7, 13)


def n1():
    return build_sequence((1, 16), [(P, A), (P, B), (D, A), (D, B)], seq_id=0)


def test_level_ods_of_n1():
    assert [(l.origin, l.destination) for l in level_ods(n1())] == [(1, 4), (4, 7), (7, 10), (10, 13), (13, 16)]


def test_solo_level_od():
    seq = build_sequence((1, 16), [])
    assert [(l.origin, l.destination) for l in level_ods(seq)] == [(1, 16)]


def test_same_node_tasks_give_a_virtual_level():
    seq = build_sequence((1, 16), [(P, A), (P, A), (D, A), (D, A)])
    levels = level_ods(seq)
    assert levels[1].virtual and (levels[1].origin, levels[1].destination) == (4, 4)
    assert not levels[0].virtual


def test_driver_classes_carry_status_tags():
    sets = build_flow_classes([n1()])
    rd = [c for c in sets[((1, 16), Mode.RD)] if c.sequence_id is not None]
    assert [c.level for c in rd] == [1, 2, 3, 4, 5]
    assert [c.tag for c in rd] == [-1, 0, 0, 0, -1]
    assert rd[0].layer == CostLayer.RD_EMPTY and rd[1].layer == CostLayer.RD_SHARED
    # the driver can always quit to drive alone
    assert sets[((1, 16), Mode.RD)][-1].kind == ClassKind.DA


def test_passenger_class_span():
    sets = build_flow_classes([n1()])
    rp = [(c.sequence_id, c.level, c.tag) for c in sets[(A, Mode.RP)] if c.sequence_id is not None]
    assert rp == [(0, 2, 2), (0, 3, 2)]
    assert sets[(A, Mode.RP)][-1].tag == RP_QUIT_TAG


def test_od_without_sequences_has_only_solo_classes():
    sets = build_flow_classes([], ods=[(2, 3)])
    assert [c.kind for c in sets[((2, 3), Mode.RD)]] == [ClassKind.DA]
    assert [c.tag for c in sets[((2, 3), Mode.RP)]] == [RP_QUIT_TAG]
    assert len(sets[((2, 3), Mode.DA)]) == 1 and len(sets[((2, 3), Mode.PT)]) == 1


def test_sequence_injections():
    sets = build_flow_classes([n1()])
    out = sequence_demand_vector({0: 20000.0}, sets, {((1, 16), Mode.RD): 40000.0})
    level2 = next(c for c in out if c.kind == ClassKind.RD and c.level == 2)
    assert out[level2] == {4: 20000.0, 7: -20000.0}
    da = next(c for c in out if c.kind == ClassKind.DA and c.od == (1, 16))
    assert out[da] == {1: 20000.0, 16: -20000.0}


def test_zero_sequence_flow_injects_nothing():
    sets = build_flow_classes([n1()])
    out = sequence_demand_vector({0: 0.0}, sets)
    assert all(v == {} for c, v in out.items() if c.sequence_id is not None)
