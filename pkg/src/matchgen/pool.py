import concurrent.futures
import json
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from src.matchgen import DEFAULT_CAPACITY, DEFAULT_DETOUR_FACTOR, DEFAULT_MAX_PASSENGERS, logger
from src.matchgen.groups import enumerate_groups
from src.matchgen.models import MatchingSequence, SequencePool
from src.matchgen.sequences import saving_rank, sequence_vkt_saving
from src.netio.models import OD, Network


def shortest_tables(network: Network, sources: Iterable[int]) -> Tuple[Dict[Tuple[int, int], float], Dict[Tuple[int, int], float]]:
    """Free-flow shortest times and shortest distances from every source node."""
    graph = nx.DiGraph()
    for link in network.links:
        graph.add_edge(link.tail, link.head, time=link.free_flow_time, length=link.length)
    times, dists = {}, {}
    for source in sorted(set(sources)):
        if source not in graph:
            continue
        for target, value in nx.single_source_dijkstra_path_length(graph, source, weight="time").items():
            times[(source, target)] = value
        for target, value in nx.single_source_dijkstra_path_length(graph, source, weight="length").items():
            dists[(source, target)] = value
    return times, dists


def _driver_sequences(driver_od: OD, passenger_ods: List[OD], capacity: int, max_passengers: int,
                      detour_factor: float, times, dists, max_repeat: int,
                      passenger_detour_factor: Optional[float], max_per_driver: Optional[int]) -> Tuple[List[MatchingSequence], int]:
    groups = enumerate_groups(driver_od, passenger_ods, capacity, max_passengers, base_times=times,
                              detour_factor=detour_factor, max_repeat=max_repeat,
                              passenger_detour_factor=passenger_detour_factor)
    sequences = []
    for group in groups:
        if not group.passenger_ods:
            continue
        for seq in group.feasible_sequences:
            sequences.append(seq.copy(update={"r_value": sequence_vkt_saving(seq, dists)}))
    pruned = 0
    if max_per_driver is not None and len(sequences) > max_per_driver:
        # ids are not assigned yet, so equal keys keep generation order
        sequences.sort(key=saving_rank)
        pruned = len(sequences) - max_per_driver
        sequences = sequences[:max_per_driver]
    return sequences, pruned


def build_sequence_pool(network: Network, driver_ods: Iterable[OD], passenger_ods: Iterable[OD],
                        capacity: int = DEFAULT_CAPACITY, max_passengers: int = DEFAULT_MAX_PASSENGERS,
                        detour_factor: float = DEFAULT_DETOUR_FACTOR, same_od_passengers: bool = True,
                        passenger_detour_factor: Optional[float] = None,
                        max_sequences_per_driver_od: Optional[int] = None, threads: int = 1) -> SequencePool:
    driver_ods = sorted(set(driver_ods))
    passenger_ods = sorted(set(passenger_ods))
    nodes = {n for od in driver_ods + passenger_ods for n in od}
    times, dists = shortest_tables(network, nodes)
    # repeats are bounded by group size, not seats: p-d-p-d chains fit a capacity of one
    max_repeat = max(max_passengers, 1) if same_od_passengers else 1

    args = (capacity, max_passengers, detour_factor, times, dists, max_repeat,
            passenger_detour_factor, max_sequences_per_driver_od)
    results: Dict[OD, Tuple[List[MatchingSequence], int]] = {}
    if threads > 1 and len(driver_ods) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
            futures = {executor.submit(_driver_sequences, od, passenger_ods, *args): od for od in driver_ods}
            for future in concurrent.futures.as_completed(futures):
                results[futures[future]] = future.result()
    else:
        for od in driver_ods:
            results[od] = _driver_sequences(od, passenger_ods, *args)

    # ids follow driver od order so threaded and serial runs agree
    sequences, by_driver, pruned = [], {}, 0
    for od in driver_ods:
        seqs, dropped = results[od]
        pruned += dropped
        if not seqs:
            continue
        by_driver[od] = []
        for seq in seqs:
            by_driver[od].append(len(sequences))
            sequences.append(seq.copy(update={"id": len(sequences)}))

    if pruned:
        logger.warning(f"Pruned {pruned} sequences above max_sequences_per_driver_od={max_sequences_per_driver_od}")
    logger.info(f"Sequence pool: {len(sequences)} sequences for {len(by_driver)} driver ODs "
                f"(capacity={capacity}, max_passengers={max_passengers}, detour={detour_factor})")
    return SequencePool(sequences=sequences, by_driver=by_driver, capacity=capacity,
                        detour_factor=detour_factor, max_passengers=max_passengers, pruned=pruned)


def dump_sequences(pool: SequencePool, path: str):
    """One JSON record per line: id, driver od, task list, R_n, occupancy."""
    with open(path, "w") as f:
        for seq in pool.sequences:
            record = {
                "id": seq.id,
                "driver_od": list(seq.driver_od),
                "tasks": [{"kind": t.kind.value, "node": t.node, "od": list(t.od)} for t in seq.tasks],
                "r_value": seq.r_value,
                "occupancy": seq.occupancy,
            }
            f.write(json.dumps(record) + "\n")
    logger.info(f"Wrote {len(pool)} sequences to {path}")
