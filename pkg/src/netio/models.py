from typing import Dict, List, Optional, Set, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, validator

from src.share.modes import CostLayer, Mode

OD = Tuple[int, int]


class Link(BaseModel):
    tail: int
    head: int
    capacity: float = Field(..., description="vehicles per period")
    length: float = Field(..., description="distance units")
    free_flow_time: float = Field(..., description="minutes")
    bpr_alpha: float = 0.15
    bpr_beta: float = 4.0
    speed: float = 0.0
    toll: float = 0.0
    link_type: int = 1

    @validator("capacity")
    def capacity_positive(cls, v):
        if v <= 0:
            raise ValueError("capacity must be > 0")
        return v

    @validator("free_flow_time")
    def free_flow_time_positive(cls, v):
        if v <= 0:
            raise ValueError("free_flow_time must be > 0")
        return v

    @validator("length", "bpr_alpha")
    def non_negative(cls, v):
        if v < 0:
            raise ValueError("must be >= 0")
        return v

    @validator("bpr_beta")
    def beta_at_least_one(cls, v):
        if v < 1:
            raise ValueError("bpr_beta must be >= 1")
        return v


class NetworkArrays(BaseModel):
    """Column view of the link table, indexed by link position."""
    tails: np.ndarray
    heads: np.ndarray
    free_flow_time: np.ndarray
    capacity: np.ndarray
    length: np.ndarray
    bpr_alpha: np.ndarray
    bpr_beta: np.ndarray

    class Config:
        arbitrary_types_allowed = True


class Network(BaseModel):
    nodes: List[int]
    links: List[Link]
    origins: Set[int] = set()
    destinations: Set[int] = set()

    _node_index: Optional[Dict[int, int]] = PrivateAttr(default=None)
    _link_index: Optional[Dict[Tuple[int, int], int]] = PrivateAttr(default=None)
    _arrays: Optional[NetworkArrays] = PrivateAttr(default=None)

    @validator("links")
    def endpoints_declared(cls, links, values):
        nodes = set(values.get("nodes", []))
        for link in links:
            if link.tail not in nodes or link.head not in nodes:
                raise ValueError(f"link ({link.tail},{link.head}) uses an undeclared node")
        return links

    @property
    def node_index(self) -> Dict[int, int]:
        if self._node_index is None:
            self._node_index = {node: i for i, node in enumerate(self.nodes)}
        return self._node_index

    @property
    def link_index(self) -> Dict[Tuple[int, int], int]:
        if self._link_index is None:
            self._link_index = {(link.tail, link.head): i for i, link in enumerate(self.links)}
        return self._link_index

    @property
    def arrays(self) -> NetworkArrays:
        if self._arrays is not None:
            return self._arrays
        index = self.node_index
        self._arrays = NetworkArrays(
            tails=np.array([index[link.tail] for link in self.links], dtype=int),
            heads=np.array([index[link.head] for link in self.links], dtype=int),
            free_flow_time=np.array([link.free_flow_time for link in self.links], dtype=float),
            capacity=np.array([link.capacity for link in self.links], dtype=float),
            length=np.array([link.length for link in self.links], dtype=float),
            bpr_alpha=np.array([link.bpr_alpha for link in self.links], dtype=float),
            bpr_beta=np.array([link.bpr_beta for link in self.links], dtype=float),
        )
        return self._arrays

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_links(self) -> int:
        return len(self.links)

    def to_digraph(self, weights: Optional[np.ndarray] = None) -> nx.DiGraph:
        """DiGraph with one edge per link; edge attribute `index` is the link position."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for i, link in enumerate(self.links):
            weight = float(weights[i]) if weights is not None else link.free_flow_time
            graph.add_edge(link.tail, link.head, index=i, weight=weight)
        return graph

    def with_endpoints(self, ods) -> "Network":
        origins = set(self.origins) | {o for o, _ in ods}
        destinations = set(self.destinations) | {d for _, d in ods}
        return self.copy(update={"origins": origins, "destinations": destinations})


class ModeCoefficients(BaseModel):
    alpha: float = Field(1.0, description="value of time, cost per minute")
    beta: float = Field(0.0, description="operating cost per distance, drivers only")
    tau_t: float = Field(0.0, description="inconvenience per minute")
    tau_d: float = Field(0.0, description="inconvenience per distance")
    nu_t: float = Field(0.0, description="price per minute")
    nu_d: float = Field(0.0, description="price per distance")
    fixed: float = Field(0.0, description="additive constant per link")
    fixed_shared: Optional[float] = Field(None, description="RD additive constant while carrying a passenger")

    @validator("alpha", "beta", "tau_t", "tau_d", "nu_t", "nu_d", "fixed")
    def non_negative(cls, v):
        if v < 0:
            raise ValueError("cost coefficients must be >= 0")
        return v


class ModeCostParams(BaseModel):
    DA: ModeCoefficients = ModeCoefficients(alpha=1.0, beta=1.0)
    RD: ModeCoefficients = ModeCoefficients(alpha=1.0, beta=1.0, tau_t=0.3, tau_d=0.2, nu_t=0.3, nu_d=0.7)
    RP: ModeCoefficients = ModeCoefficients(alpha=0.6, tau_t=0.3, tau_d=0.1, nu_t=0.1, nu_d=0.4)
    PT: ModeCoefficients = ModeCoefficients(alpha=0.4, tau_t=0.6, tau_d=0.6, nu_t=0.0, nu_d=0.4)

    def for_mode(self, mode: Mode) -> ModeCoefficients:
        return getattr(self, Mode(mode).value)

    def layer_coefficients(self, layer: CostLayer) -> Tuple[float, float, float]:
        """(time coefficient, distance coefficient, fixed term) of one cost layer."""
        layer = CostLayer(layer)
        if layer == CostLayer.DA:
            c = self.DA
            return c.alpha, c.beta, c.fixed
        if layer == CostLayer.RD_EMPTY:
            c = self.RD
            return c.alpha, c.beta, c.fixed
        if layer == CostLayer.RD_SHARED:
            c = self.RD
            fixed = c.fixed if c.fixed_shared is None else c.fixed_shared
            return c.alpha + c.tau_t - c.nu_t, c.beta + c.tau_d - c.nu_d, fixed
        if layer == CostLayer.RP:
            c = self.RP
            return c.alpha + c.tau_t + c.nu_t, c.tau_d + c.nu_d, c.fixed
        c = self.PT
        return c.alpha + c.tau_t + c.nu_t, c.tau_d + c.nu_d, c.fixed


class DemandTable(BaseModel):
    demands: Dict[OD, float] = {}

    @validator("demands")
    def positive_entries(cls, v):
        for od, q in v.items():
            if q <= 0:
                raise ValueError(f"demand for {od} must be > 0")
        return v

    @property
    def ods(self) -> List[OD]:
        return sorted(self.demands)

    def total(self) -> float:
        return float(sum(self.demands.values()))

    def get(self, od: OD) -> float:
        return self.demands.get(od, 0.0)

    def merged(self, other: "DemandTable") -> "DemandTable":
        out = dict(self.demands)
        for od, q in other.demands.items():
            out[od] = out.get(od, 0.0) + q
        return DemandTable(demands=out)
