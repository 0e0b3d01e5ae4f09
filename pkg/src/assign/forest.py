"""
Bushes shared by every commodity with the same root, plus the commodity registry that
tells which flow rows live on which (root, cost layer).
"""
from typing import Dict, List, Tuple

import numpy as np

from src.assign import DisconnectedODError
from src.assign.models import FlowState
from src.assign.problem import Problem
from src.bush import TRANSIT_GROUP, VEHICLE_GROUP, UnreachableNodeError
from src.bush.bush import Bush, build_initial_bush, set_labels, update_bush
from src.bush.models import BushLabels
from src.netio.costs import CostSnapshot
from src.share.modes import CostLayer

# commodity keys: ("da", w), ("pt", w), ("lvl", row)
Key = Tuple[str, int]


def da_key(w: int) -> Key:
    return "da", w


def pt_key(w: int) -> Key:
    return "pt", w


def level_key(row: int) -> Key:
    return "lvl", row


def group_of(layer: CostLayer) -> str:
    return TRANSIT_GROUP if layer == CostLayer.PT else VEHICLE_GROUP


class BushForest:
    def __init__(self, problem: Problem):
        self.problem = problem
        self.bushes: Dict[Tuple[int, str], Bush] = {}
        self.commodities: Dict[Tuple[int, CostLayer], List[Key]] = {}
        self._label_cache: Dict[Tuple[int, CostLayer], Tuple[int, BushLabels]] = {}
        self._register()

    def _register(self):
        p = self.problem
        for w, (o, _) in enumerate(p.ods):
            self.commodities.setdefault((o, CostLayer.DA), []).append(da_key(w))
            self.commodities.setdefault((o, CostLayer.PT), []).append(pt_key(w))
        for n, levels in enumerate(p.seq_levels):
            for lod, layer in zip(levels, p.seq_layers[n]):
                if lod.virtual:
                    continue
                self.commodities.setdefault((lod.origin, layer), []).append(level_key(p.level_row(n, lod.level)))

    @staticmethod
    def flow_of(state: FlowState, key: Key) -> np.ndarray:
        kind, i = key
        if kind == "da":
            return state.da_flows[i]
        if kind == "pt":
            return state.pt_flows[i]
        return state.level_flows[i]

    def roots(self) -> List[Tuple[int, str]]:
        out = set()
        for root, layer in self.commodities:
            out.add((root, group_of(layer)))
        return sorted(out)

    def layers_at(self, root: int, group: str) -> List[CostLayer]:
        return [layer for (r, layer) in self.commodities if r == root and group_of(layer) == group]

    def bush(self, root: int, layer: CostLayer, snapshot: CostSnapshot) -> Bush:
        group = group_of(layer)
        key = (root, group)
        if key not in self.bushes:
            base = CostLayer.PT if group == TRANSIT_GROUP else CostLayer.DA
            try:
                self.bushes[key] = build_initial_bush(self.problem.network, root, snapshot.cost(base),
                                                      destinations=self._destinations(root, group), group=group)
            except UnreachableNodeError as e:
                raise DisconnectedODError(str(e))
        return self.bushes[key]

    def _destinations(self, root: int, group: str) -> List[int]:
        p = self.problem
        out = set()
        for w, (o, d) in enumerate(p.ods):
            if o == root:
                out.add(d)
        if group == VEHICLE_GROUP:
            for levels in p.seq_levels:
                for lod in levels:
                    if lod.origin == root and not lod.virtual:
                        out.add(lod.destination)
        return sorted(out)

    def build_all(self, snapshot: CostSnapshot):
        for root, layer in sorted(self.commodities):
            self.bush(root, layer, snapshot)

    def min_labels(self, root: int, layer: CostLayer, snapshot: CostSnapshot) -> BushLabels:
        cached = self._label_cache.get((root, layer))
        if cached and cached[0] == snapshot.version:
            return cached[1]
        labels = set_labels(self.bush(root, layer, snapshot), snapshot.cost(layer), version=snapshot.version)
        self._label_cache[(root, layer)] = (snapshot.version, labels)
        return labels

    def flow_labels(self, root: int, layer: CostLayer, snapshot: CostSnapshot,
                    supports: Dict[Key, np.ndarray]) -> BushLabels:
        """Min labels plus max labels over the links carrying each supported flow."""
        return set_labels(self.bush(root, layer, snapshot), snapshot.cost(layer), supports, version=snapshot.version)

    def root_flows(self, root: int, group: str, state: FlowState) -> np.ndarray:
        total = np.zeros(self.problem.network.num_links)
        for (r, layer), keys in self.commodities.items():
            if r != root or group_of(layer) != group:
                continue
            for key in keys:
                total += self.flow_of(state, key)
        return total

    def update_all(self, snapshot: CostSnapshot, state: FlowState):
        """Bush update for every root against one cost snapshot."""
        for (root, group), bush in sorted(self.bushes.items()):
            layers = self.layers_at(root, group)
            update_bush(bush, self.root_flows(root, group, state), [snapshot.cost(layer) for layer in layers])
        self._label_cache.clear()

    def adopt(self, other: "BushForest"):
        """Takes over the bush topologies of a solved forest over the same network and pool."""
        network = self.problem.network
        for key, bush in other.bushes.items():
            self.bushes[key] = Bush(network, bush.root, bush.mask.copy(), bush.group)
        self._label_cache.clear()

    def pending(self) -> int:
        """Improving links left outside the bushes by the last update."""
        return sum(b.pending for b in self.bushes.values())

    def all_acyclic(self) -> bool:
        return all(b.is_acyclic() for b in self.bushes.values())
