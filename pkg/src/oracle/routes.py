"""
Exhaustive route sets: every simple path of an od (or of every level of a sequence) up
to a hop limit, as link-position lists.
"""
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel
from scipy import sparse

from src import config
from src.hypernet.classes import LevelOD, level_ods
from src.matchgen.models import MatchingSequence
from src.netio.models import Network
from src.oracle import EmptyRouteSetError, RouteBudgetError

Path = List[int]


class EnumeratedRouteSet(BaseModel):
    """Per level: every simple path of the level od. Virtual levels hold the single empty path."""
    sequence_id: Optional[int] = None
    levels: List[LevelOD] = []
    paths: Dict[int, List[Path]] = {}

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(self.paths[lod.level]) for lod in self.levels)

    @property
    def count(self) -> int:
        return int(np.prod(self.sizes)) if self.levels else 0

    def routes(self) -> Iterator[Tuple[Path, ...]]:
        """Every sequence-route as one path per level, in lexicographic index order."""
        for index in np.ndindex(*self.sizes):
            yield tuple(self.paths[lod.level][i] for lod, i in zip(self.levels, index))


def enumerate_paths(network: Network, origin: int, destination: int, hop_limit: Optional[int] = None,
                    budget: int = config.ORACLE_ROUTE_BUDGET) -> List[Path]:
    if origin == destination:
        return [[]]
    graph = network.to_digraph()
    out = []
    for nodes in nx.all_simple_paths(graph, origin, destination, cutoff=hop_limit):
        out.append([network.link_index[(a, b)] for a, b in zip(nodes[:-1], nodes[1:])])
        if len(out) > budget:
            raise RouteBudgetError(f"more than {budget} paths from {origin} to {destination}", len(out))
    if not out:
        raise EmptyRouteSetError(f"no path from {origin} to {destination} within {hop_limit} hops")
    return sorted(out, key=lambda p: (len(p), p))


def enumerate_sequence_routes(seq: MatchingSequence, network: Network, hop_limit: Optional[int] = None,
                              budget: int = config.ORACLE_ROUTE_BUDGET) -> EnumeratedRouteSet:
    """Cartesian product of the level path sets; refuses products above `budget`."""
    levels = level_ods(seq)
    paths: Dict[int, List[Path]] = {}
    estimate = 1
    for lod in levels:
        paths[lod.level] = enumerate_paths(network, lod.origin, lod.destination, hop_limit, budget)
        estimate *= len(paths[lod.level])
        if estimate > budget:
            raise RouteBudgetError(f"sequence {seq.id} {seq.label()} exceeds the route budget {budget}", estimate)
    return EnumeratedRouteSet(sequence_id=seq.id, levels=levels, paths=paths)


def incidence(paths: List[Path], num_links: int) -> sparse.csr_matrix:
    """(path, link) use counts."""
    rows, cols = [], []
    for i, path in enumerate(paths):
        rows.extend([i] * len(path))
        cols.extend(path)
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(paths), num_links))
