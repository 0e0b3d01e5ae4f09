from typing import Hashable, Mapping, Optional

from src.bush import StaleLabelsError
from src.bush.bush import trace_route
from src.bush.models import BushLabels, Route, SequenceRoute, SequenceRouteCosts
from src.hypernet.classes import level_ods
from src.matchgen.models import MatchingSequence
from src.netio.models import Network


def sequence_routes(seq: MatchingSequence, network: Network, level_labels: Mapping[int, BushLabels],
                    version: Optional[int] = None, keys: Optional[Mapping[int, Hashable]] = None) -> SequenceRouteCosts:
    """
    Chains the cheapest (and costliest) route of every level into sequence-routes.
    `level_labels[l]` holds the labels of the bush rooted at the level-l origin in the
    level's cost layer; `keys[l]` names the level's flow in those labels' max side.
    """
    min_routes, max_routes = [], []
    min_cost = max_cost = 0.0
    for lod in level_ods(seq):
        if lod.virtual:
            min_routes.append(Route())
            max_routes.append(Route())
            continue
        labels = level_labels[lod.level]
        if labels.root != lod.origin:
            raise ValueError(f"level {lod.level} labels are rooted at {labels.root}, expected {lod.origin}")
        if version is not None and labels.version != version:
            raise StaleLabelsError(f"labels at root {labels.root} carry version {labels.version}, costs are at {version}")
        dest = network.node_index[lod.destination]
        key = keys.get(lod.level) if keys else (seq.id, lod.level)
        ucost, upred = labels.max_for(key)
        min_routes.append(trace_route(network, labels, lod.destination))
        max_routes.append(trace_route(network, labels, lod.destination, upred))
        min_cost += float(labels.min_cost[dest])
        max_cost += float(ucost[dest])
    return SequenceRouteCosts(
        min_route=SequenceRoute(routes=min_routes),
        max_route=SequenceRoute(routes=max_routes),
        min_cost=min_cost,
        max_cost=max_cost,
    )
