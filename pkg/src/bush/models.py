from typing import Dict, Hashable, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.netio.models import Network


class Route(BaseModel):
    links: List[int] = Field(default_factory=list, description="link positions from root to destination")

    def nodes(self, network: Network, start: Optional[int] = None) -> List[int]:
        if not self.links:
            return [] if start is None else [start]
        out = [network.links[self.links[0]].tail]
        out += [network.links[i].head for i in self.links]
        return out

    def cost(self, link_costs: np.ndarray) -> float:
        return float(link_costs[self.links].sum()) if self.links else 0.0


class SequenceRoute(BaseModel):
    """One route per level of a matching sequence; virtual levels hold an empty route."""
    routes: List[Route]

    def link_union(self) -> List[int]:
        out = []
        for route in self.routes:
            out.extend(route.links)
        return out


class BushLabels(BaseModel):
    root: int
    version: Optional[int] = None
    min_cost: np.ndarray
    min_pred: np.ndarray
    max_cost: Dict[Hashable, np.ndarray] = {}
    max_pred: Dict[Hashable, np.ndarray] = {}

    class Config:
        arbitrary_types_allowed = True

    def max_for(self, key: Hashable):
        if key in self.max_cost:
            return self.max_cost[key], self.max_pred[key]
        return self.min_cost, self.min_pred


class SequenceRouteCosts(BaseModel):
    min_route: SequenceRoute
    max_route: SequenceRoute
    min_cost: float
    max_cost: float
