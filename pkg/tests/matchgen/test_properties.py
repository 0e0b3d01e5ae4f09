from hypothesis import given, settings, strategies as st

from src.matchgen.models import RdRpGroup
from src.matchgen.pool import shortest_tables
from src.matchgen.sequences import generate_sequences
from src.netio.illustrative import illustrative_network

NETWORK = illustrative_network()
CORNERS = [1, 4, 7, 10, 13, 16]
TIMES, _ = shortest_tables(NETWORK, CORNERS)

ods = st.tuples(st.sampled_from(CORNERS), st.sampled_from(CORNERS)).filter(lambda od: od[0] != od[1])


@settings(max_examples=60, deadline=None)
@given(driver=ods, passengers=st.lists(ods, min_size=0, max_size=2), capacity=st.integers(1, 3),
       detour=st.floats(1.0, 3.0))
def test_generated_sequences_are_feasible(driver, passengers, capacity, detour):
    group = RdRpGroup(driver_od=driver, passenger_ods=tuple(sorted(passengers)))
    for seq in generate_sequences(group, capacity, detour, TIMES):
        assert seq.nodes[0] == driver[0] and seq.nodes[-1] == driver[1]
        assert max(seq.occupancy) <= capacity
        assert seq.occupancy[-1] == 0
        assert sorted(slot.od for slot in seq.passengers) == sorted(passengers)
        for slot in seq.passengers:
            assert slot.pickup < slot.dropoff
            assert seq.tasks[slot.pickup].node == slot.od[0]
            assert seq.tasks[slot.dropoff].node == slot.od[1]
        total = sum(TIMES[(a, b)] for a, b in zip(seq.nodes[:-1], seq.nodes[1:]) if a != b)
        assert total <= detour * TIMES[driver] * (1 + 1e-9) + 1e-6


@settings(max_examples=30, deadline=None)
@given(passengers=st.lists(ods, min_size=1, max_size=2), capacity=st.integers(1, 2))
def test_looser_detour_never_loses_sequences(passengers, capacity):
    group = RdRpGroup(driver_od=(1, 16), passenger_ods=tuple(sorted(passengers)))
    tight = {tuple(s.nodes) for s in generate_sequences(group, capacity, 1.2, TIMES)}
    loose = {tuple(s.nodes) for s in generate_sequences(group, capacity, 2.5, TIMES)}
    assert tight <= loose
