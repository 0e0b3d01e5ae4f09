"""
Incremental growth of feasible RD-RP groups: a group of k passengers is tried only
when every k-1 subgroup was feasible.
"""
from collections import Counter
from typing import Iterable, List, Optional, Set, Tuple

from src.matchgen import DEFAULT_DETOUR_FACTOR, logger
from src.matchgen.models import RdRpGroup
from src.matchgen.sequences import ShortestTable, generate_sequences
from src.netio.models import OD

GroupKey = Tuple[OD, ...]


def _sub_keys(key: GroupKey) -> Set[GroupKey]:
    return {key[:i] + key[i + 1:] for i in range(len(key))}


def enumerate_groups(driver_od: OD, passenger_ods: Iterable[OD], capacity: int, max_passengers: int,
                     base_times: Optional[ShortestTable] = None, detour_factor: float = DEFAULT_DETOUR_FACTOR,
                     max_repeat: int = 1, passenger_detour_factor: Optional[float] = None) -> List[RdRpGroup]:
    """
    Feasible groups for one driver OD, smallest first. The solo group is always first.
    `max_repeat` bounds how often one passenger OD may appear in a group.
    """
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    base_times = base_times or {}
    candidates = sorted(set(passenger_ods))

    def try_group(key: GroupKey) -> RdRpGroup:
        group = RdRpGroup(driver_od=driver_od, passenger_ods=key)
        sequences = generate_sequences(group, capacity, detour_factor, base_times, passenger_detour_factor)
        return group.copy(update={"feasible_sequences": sequences})

    solo = try_group(())
    groups = [solo]
    if capacity == 0 or max_passengers <= 0:
        return groups

    feasible = {(): solo}
    singles = []
    for size in range(1, max_passengers + 1):
        if size == 1:
            keys = [(od,) for od in candidates]
        else:
            # grow from feasible (k-1)-groups by one feasible single
            keys = set()
            for prev in feasible:
                if len(prev) != size - 1:
                    continue
                for (od,) in singles:
                    key = tuple(sorted(prev + (od,)))
                    if Counter(key)[od] <= max_repeat:
                        keys.add(key)
            keys = sorted(keys)
        grown = 0
        for key in keys:
            if not all(sub in feasible for sub in _sub_keys(key)):
                continue
            group = try_group(key)
            if group.feasible:
                feasible[key] = group
                groups.append(group)
                grown += 1
                if size == 1:
                    singles.append(key)
        if grown == 0:
            break
    logger.debug(f"driver {driver_od}: {len(groups)} feasible groups")
    return groups
