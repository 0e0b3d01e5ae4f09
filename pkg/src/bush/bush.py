"""
Rooted acyclic subnetworks (bushes) with one-pass min/max label setting.
"""
from typing import Hashable, List, Mapping, Optional, Sequence, Union

import networkx as nx
import numpy as np

from src.bush import COST_EPS, FLOW_EPS, VEHICLE_GROUP, UnreachableNodeError, logger
from src.bush.models import BushLabels, Route
from src.netio.models import Network

CostInput = Union[np.ndarray, Sequence[np.ndarray]]


def _as_layers(costs: CostInput) -> List[np.ndarray]:
    if isinstance(costs, np.ndarray) and costs.ndim == 1:
        return [costs]
    return list(costs)


class Bush:
    def __init__(self, network: Network, root: int, mask: np.ndarray, group: str = VEHICLE_GROUP):
        self.network = network
        self.root = root
        self.root_index = network.node_index[root]
        self.group = group
        self.mask = mask.astype(bool)
        self.labels: Optional[BushLabels] = None
        self.pending = 0
        self._reorder()

    def _reorder(self):
        """Topological ranks of the retained links; nodes off the bush get rank -1."""
        arrays = self.network.arrays
        graph = nx.DiGraph()
        graph.add_node(self.root_index)
        links = np.flatnonzero(self.mask)
        graph.add_edges_from(zip(arrays.tails[links].tolist(), arrays.heads[links].tolist()))
        order = list(nx.lexicographical_topological_sort(graph))
        self.order = order
        self.rank = np.full(self.network.num_nodes, -1, dtype=int)
        self.rank[order] = np.arange(len(order))
        # links sorted by head rank: every link into i precedes every link out of i
        self.sorted_links = links[np.lexsort((links, self.rank[arrays.heads[links]]))]

    @property
    def links(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def contains(self, node: int) -> bool:
        return self.rank[self.network.node_index[node]] >= 0

    def is_acyclic(self) -> bool:
        arrays = self.network.arrays
        links = self.links
        return bool(np.all(self.rank[arrays.tails[links]] < self.rank[arrays.heads[links]]))

    def link_pairs(self) -> List[tuple]:
        return [(self.network.links[i].tail, self.network.links[i].head) for i in self.links]


def _shortest_tree_mask(network: Network, root: int, costs: np.ndarray) -> np.ndarray:
    graph = network.to_digraph(costs)
    _, paths = nx.single_source_dijkstra(graph, root, weight="weight")
    mask = np.zeros(network.num_links, dtype=bool)
    for node, path in paths.items():
        if len(path) >= 2:
            mask[network.link_index[(path[-2], path[-1])]] = True
    return mask


def build_initial_bush(network: Network, root: int, costs: np.ndarray, destinations: Optional[Sequence[int]] = None,
                       group: str = VEHICLE_GROUP) -> Bush:
    """Shortest-path tree from root under `costs`; every destination must be reached."""
    if root not in network.node_index:
        raise UnreachableNodeError(root)
    if np.any(costs <= 0):
        raise ValueError("bush construction needs strictly positive link costs")
    mask = _shortest_tree_mask(network, root, costs)
    bush = Bush(network, root, mask, group)
    targets = network.destinations if destinations is None else destinations
    for node in sorted(targets):
        if node != root and not bush.contains(node):
            raise UnreachableNodeError(node, root)
    bush.labels = set_labels(bush, costs)
    return bush


def set_labels(bush: Bush, costs: np.ndarray, supports: Optional[Mapping[Hashable, np.ndarray]] = None,
               version: Optional[int] = None) -> BushLabels:
    """
    Min labels over all bush links and, per support key, max labels over the links that
    carry that key's flow. A key without flow falls back to the min labels.
    """
    arrays = bush.network.arrays
    n = bush.network.num_nodes
    links = bush.sorted_links
    tails = arrays.tails[links]
    heads = arrays.heads[links]
    c = costs[links]

    min_cost = np.full(n, np.inf)
    min_pred = np.full(n, -1, dtype=int)
    min_cost[bush.root_index] = 0.0
    for k in range(len(links)):
        cand = min_cost[tails[k]] + c[k]
        if cand < min_cost[heads[k]]:
            min_cost[heads[k]] = cand
            min_pred[heads[k]] = links[k]

    labels = BushLabels(root=bush.root, version=version, min_cost=min_cost, min_pred=min_pred)
    if not supports:
        return labels

    keys = [key for key, flow in supports.items() if flow[links].sum() > FLOW_EPS]
    if not keys:
        return labels
    carried = np.stack([supports[key][links] > FLOW_EPS for key in keys])
    max_cost = np.full((len(keys), n), -np.inf)
    max_pred = np.full((len(keys), n), -1, dtype=int)
    max_cost[:, bush.root_index] = 0.0
    for k in range(len(links)):
        cand = max_cost[:, tails[k]] + c[k]
        better = carried[:, k] & (cand > max_cost[:, heads[k]])
        if better.any():
            max_cost[better, heads[k]] = cand[better]
            max_pred[better, heads[k]] = links[k]
    for row, key in enumerate(keys):
        # nodes outside the key's support read the min label
        missing = max_pred[row] < 0
        max_cost[row, missing] = min_cost[missing]
        max_pred[row, missing] = min_pred[missing]
        labels.max_cost[key] = max_cost[row]
        labels.max_pred[key] = max_pred[row]
    return labels


def trace_route(network: Network, labels: BushLabels, destination: int, pred: Optional[np.ndarray] = None) -> Route:
    """Walk predecessor links back from destination to the root."""
    pred = labels.min_pred if pred is None else pred
    arrays = network.arrays
    root = network.node_index[labels.root]
    node = network.node_index[destination]
    out = []
    while node != root:
        link = pred[node]
        if link < 0:
            raise UnreachableNodeError(destination, labels.root)
        out.append(int(link))
        node = arrays.tails[link]
        if len(out) > network.num_links:
            raise RuntimeError(f"predecessor cycle tracing {destination} from {labels.root}")
    out.reverse()
    return Route(links=out)


def _improving_links(bush: Bush, layers: List[np.ndarray]) -> np.ndarray:
    """Non-bush links that shorten some layer's min label."""
    arrays = bush.network.arrays
    inside = (bush.rank[arrays.tails] >= 0) & (bush.rank[arrays.heads] >= 0)
    improving = np.zeros(bush.network.num_links, dtype=bool)
    for layer_costs in layers:
        pi = set_labels(bush, layer_costs).min_cost
        with np.errstate(invalid="ignore"):
            improving |= inside & ~bush.mask & (pi[arrays.tails] + layer_costs < pi[arrays.heads] - COST_EPS)
    return improving


def update_bush(bush: Bush, flows: np.ndarray, costs: CostInput) -> Bush:
    """
    Drops unused links (never the last link into a node), then adds links that improve a
    min label without closing a cycle. When improving links exist but none can be added,
    every order-respecting link is added instead. `bush.pending` counts the improving links
    still outside afterwards; zero means the bush is at a fixed point.
    """
    arrays = bush.network.arrays
    layers = _as_layers(costs)
    mask = bush.mask.copy()

    incoming = np.bincount(arrays.heads[mask], minlength=bush.network.num_nodes)
    for link in bush.sorted_links:
        if flows[link] > FLOW_EPS:
            continue
        head = arrays.heads[link]
        if incoming[head] > 1:
            mask[link] = False
            incoming[head] -= 1
    removed = int(bush.mask.sum() - mask.sum())
    if removed:
        bush.mask = mask
        bush._reorder()

    inside = (bush.rank[arrays.tails] >= 0) & (bush.rank[arrays.heads] >= 0)
    improving = _improving_links(bush, layers)
    ordered = inside & ~bush.mask & (bush.rank[arrays.tails] < bush.rank[arrays.heads])

    add = improving & ordered
    against = np.flatnonzero(improving & ~ordered)
    if len(against):
        # a link against the current order is safe while its head cannot reach its tail
        kept = np.flatnonzero(bush.mask | add)
        graph = nx.DiGraph()
        graph.add_edges_from(zip(arrays.tails[kept].tolist(), arrays.heads[kept].tolist()))
        for link in against:
            tail, head = int(arrays.tails[link]), int(arrays.heads[link])
            if graph.has_node(head) and graph.has_node(tail) and nx.has_path(graph, head, tail):
                continue
            graph.add_edge(tail, head)
            add[link] = True
    if improving.any() and not add.any():
        add = ordered
    if add.any():
        bush.mask = bush.mask | add
        bush._reorder()
    if removed or add.any():
        logger.debug(f"bush {bush.group}@{bush.root}: -{removed} +{int(add.sum())} links")
    bush.pending = int(_improving_links(bush, layers).sum())
    bush.labels = set_labels(bush, layers[0])
    return bush
