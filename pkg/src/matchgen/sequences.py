"""
Dynamic-tree generation of feasible pickup/drop-off task orders for one RD-RP group.
"""
from collections import Counter, deque
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.matchgen import DETOUR_TOLERANCE, InfeasibleSequenceError, UnreachableLevelError
from src.matchgen.models import MatchingSequence, PassengerSlot, RdRpGroup, Task, TaskKind
from src.netio.models import OD

ShortestTable = Mapping[Tuple[int, int], float]


def _lookup(table: ShortestTable, i: int, j: int) -> float:
    if i == j:
        return 0.0
    value = table.get((i, j))
    return float("inf") if value is None else value


def occupancy_profile(seq: MatchingSequence) -> Tuple[List[int], List[int]]:
    """Load after each task (0..L) and the RD status of each level (1..L)."""
    occupancy = []
    onboard: Counter = Counter()
    load = 0
    for index, task in enumerate(seq.tasks):
        if task.kind == TaskKind.PICKUP:
            onboard[task.od] += 1
            load += 1
        elif task.kind == TaskKind.DROPOFF:
            if onboard[task.od] <= 0:
                raise InfeasibleSequenceError(f"task {index} drops off {task.od} before any pickup")
            onboard[task.od] -= 1
            load -= 1
        if load < 0:
            raise InfeasibleSequenceError(f"negative occupancy after task {index}")
        occupancy.append(load)
    status = [-1 if occupancy[l - 1] == 0 else 0 for l in range(1, len(seq.tasks))]
    return occupancy, status


def build_sequence(driver_od: OD, tokens: Sequence[Tuple[TaskKind, OD]], seq_id: int = 0) -> MatchingSequence:
    """Driver itinerary from an ordered list of (pickup|dropoff, passenger od) tokens."""
    tasks = [Task(kind=TaskKind.DEPART, node=driver_od[0], od=driver_od)]
    waiting: Dict[OD, deque] = {}
    slots = []
    for kind, od in tokens:
        index = len(tasks)
        if kind == TaskKind.PICKUP:
            tasks.append(Task(kind=kind, node=od[0], od=od))
            waiting.setdefault(od, deque()).append(index)
        else:
            tasks.append(Task(kind=kind, node=od[1], od=od))
            if not waiting.get(od):
                raise InfeasibleSequenceError(f"dropoff of {od} precedes its pickup")
            # same-od passengers leave in boarding order
            slots.append(PassengerSlot(od=od, pickup=waiting[od].popleft(), dropoff=index))
    if any(waiting.values()):
        raise InfeasibleSequenceError("passenger picked up but never dropped off")
    tasks.append(Task(kind=TaskKind.ARRIVE, node=driver_od[1], od=driver_od))
    draft = MatchingSequence(id=seq_id, driver_od=driver_od, tasks=tasks, occupancy=[], status=[],
                             passengers=sorted(slots, key=lambda s: s.pickup))
    occupancy, status = occupancy_profile(draft)
    return draft.copy(update={"occupancy": occupancy, "status": status})


def generate_sequences(group: RdRpGroup, capacity: int, detour_factor: float, base_times: ShortestTable,
                       passenger_detour_factor: Optional[float] = None) -> List[MatchingSequence]:
    if detour_factor < 1:
        raise ValueError("detour_factor must be >= 1")
    origin, destination = group.driver_od
    solo_time = _lookup(base_times, origin, destination)
    if solo_time == float("inf"):
        return []
    limit = detour_factor * solo_time * (1 + DETOUR_TOLERANCE) + DETOUR_TOLERANCE

    remaining = Counter(group.passenger_ods)
    onboard: Dict[OD, deque] = {}
    found: List[List[Tuple[TaskKind, OD]]] = []

    def ride_ok(od: OD, boarded_at: float, now: float) -> bool:
        if passenger_detour_factor is None:
            return True
        direct = _lookup(base_times, od[0], od[1])
        return now - boarded_at <= passenger_detour_factor * direct * (1 + DETOUR_TOLERANCE) + DETOUR_TOLERANCE

    def extend(node: int, elapsed: float, load: int, tokens: List[Tuple[TaskKind, OD]]):
        if not +remaining and not any(onboard.values()):
            if elapsed + _lookup(base_times, node, destination) <= limit:
                found.append(list(tokens))
            return
        if load < capacity:
            for od in sorted(+remaining):
                t = elapsed + _lookup(base_times, node, od[0])
                # shortest completion bound: a prefix over the limit has no feasible extension
                if t + _lookup(base_times, od[0], destination) > limit:
                    continue
                remaining[od] -= 1
                onboard.setdefault(od, deque()).append(t)
                tokens.append((TaskKind.PICKUP, od))
                extend(od[0], t, load + 1, tokens)
                tokens.pop()
                onboard[od].pop()
                remaining[od] += 1
        for od in sorted(k for k, v in onboard.items() if v):
            t = elapsed + _lookup(base_times, node, od[1])
            if t + _lookup(base_times, od[1], destination) > limit:
                continue
            boarded_at = onboard[od].popleft()
            if ride_ok(od, boarded_at, t):
                tokens.append((TaskKind.DROPOFF, od))
                extend(od[1], t, load - 1, tokens)
                tokens.pop()
            onboard[od].appendleft(boarded_at)

    extend(origin, 0.0, 0, [])
    return [build_sequence(group.driver_od, tokens) for tokens in found]


def level_distance(seq: MatchingSequence, shortest_dist: ShortestTable) -> float:
    total = 0.0
    for level in range(1, seq.num_levels + 1):
        o, d = seq.level_od(level)
        dist = _lookup(shortest_dist, o, d)
        if dist == float("inf"):
            raise UnreachableLevelError(f"level {level} of {seq.label()} has no path {o}->{d}")
        total += dist
    return total


def sequence_vkt_saving(seq: MatchingSequence, shortest_dist: ShortestTable) -> float:
    """Solo distances of all participants minus the chained sequence distance; may be negative."""
    solo = 0.0
    for od in [seq.driver_od] + seq.passenger_ods:
        dist = _lookup(shortest_dist, od[0], od[1])
        if dist == float("inf"):
            raise UnreachableLevelError(f"no path for od {od}")
        solo += dist
    return solo - level_distance(seq, shortest_dist)


def saving_rank(seq: MatchingSequence) -> Tuple[float, int, int, int]:
    """Sort key: larger VKT saving first, then more distinct passenger ods, more passengers, lower id."""
    return -seq.r_value, -len(seq.multiplicity()), -len(seq.passengers), seq.id
