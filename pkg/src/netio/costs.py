"""
Flow-dependent link times (BPR) and the per-class affine link cost template a*t + b*d + fixed.
"""
import itertools
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel

from src.netio import NegativeFlowError, UnknownFlowClassError, logger
from src.netio.models import Link, ModeCostParams, Network
from src.share.modes import ALL_LAYERS, CostLayer

# floor applied to routing costs so label setting sees strictly positive arcs
MIN_LINK_COST = 1e-9

PT_FREE_FLOW = "free_flow"
PT_CONGESTED = "congested"

_snapshot_versions = itertools.count(1)


def link_travel_time(link: Link, vehicular_flow: float) -> float:
    if vehicular_flow < 0:
        raise NegativeFlowError(f"negative vehicular flow {vehicular_flow} on ({link.tail},{link.head})")
    return link.free_flow_time * (1.0 + link.bpr_alpha * (vehicular_flow / link.capacity) ** link.bpr_beta)


def bpr_times(network: Network, x: np.ndarray) -> np.ndarray:
    a = network.arrays
    if np.any(x < 0):
        raise NegativeFlowError("negative vehicular flow")
    return a.free_flow_time * (1.0 + a.bpr_alpha * np.power(x / a.capacity, a.bpr_beta))


def bpr_derivatives(network: Network, x: np.ndarray) -> np.ndarray:
    a = network.arrays
    ratio = np.maximum(x, 0.0) / a.capacity
    return a.free_flow_time * a.bpr_alpha * a.bpr_beta * np.power(ratio, a.bpr_beta - 1.0) / a.capacity


def class_link_cost(link: Optional[Link], layer: CostLayer, time: float, params: ModeCostParams) -> float:
    """Cost of one link for one flow class. `link=None` is a virtual intra-sequence link and costs nothing."""
    if link is None:
        return 0.0
    try:
        layer = CostLayer(layer)
    except ValueError:
        raise UnknownFlowClassError(layer)
    a_time, b_dist, fixed = params.layer_coefficients(layer)
    return a_time * time + b_dist * link.length + fixed


class CostSnapshot(BaseModel):
    """Link times and per-layer link costs evaluated at one vehicular flow vector."""
    version: int
    x_veh: np.ndarray
    times: np.ndarray
    derivatives: np.ndarray
    pt_times: np.ndarray
    layer_costs: Dict[CostLayer, np.ndarray]
    time_coefficients: Dict[CostLayer, float]

    class Config:
        arbitrary_types_allowed = True

    def cost(self, layer: CostLayer) -> np.ndarray:
        return self.layer_costs[CostLayer(layer)]

    def layer_time(self, layer: CostLayer) -> np.ndarray:
        return self.pt_times if CostLayer(layer) == CostLayer.PT else self.times


class CostModel:
    """Evaluates every cost layer for a network under one parameter set."""

    def __init__(self, network: Network, params: ModeCostParams, pt_time: str = PT_FREE_FLOW):
        if pt_time not in (PT_FREE_FLOW, PT_CONGESTED):
            raise ValueError(f"unknown pt_time basis {pt_time!r}")
        self.network = network
        self.params = params
        self.pt_time = pt_time
        self.coefficients = {layer: params.layer_coefficients(layer) for layer in ALL_LAYERS}
        for layer, (a_time, b_dist, fixed) in self.coefficients.items():
            if a_time < 0 or b_dist < 0:
                logger.warning(f"{layer.value} cost layer has a negative coefficient ({a_time}, {b_dist}); link costs are floored at {MIN_LINK_COST}")

    def layer_cost(self, layer: CostLayer, times: np.ndarray) -> np.ndarray:
        a_time, b_dist, fixed = self.coefficients[CostLayer(layer)]
        return np.maximum(a_time * times + b_dist * self.network.arrays.length + fixed, MIN_LINK_COST)

    def evaluate(self, x_veh: np.ndarray) -> CostSnapshot:
        times = bpr_times(self.network, x_veh)
        pt_times = times if self.pt_time == PT_CONGESTED else self.network.arrays.free_flow_time.copy()
        layer_costs = {}
        for layer in ALL_LAYERS:
            layer_costs[layer] = self.layer_cost(layer, pt_times if layer == CostLayer.PT else times)
        return CostSnapshot(
            version=next(_snapshot_versions),
            x_veh=x_veh.copy(),
            times=times,
            derivatives=bpr_derivatives(self.network, x_veh),
            pt_times=pt_times,
            layer_costs=layer_costs,
            time_coefficients={layer: self.coefficients[layer][0] for layer in ALL_LAYERS},
        )

    def free_flow(self) -> CostSnapshot:
        return self.evaluate(np.zeros(self.network.num_links))
