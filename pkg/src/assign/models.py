from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

from src import config
from src.assign import COST_REFRESH_GROUP, COST_REFRESH_PASS
from src.bush.models import SequenceRoute
from src.netio.costs import PT_FREE_FLOW
from src.netio.models import ModeCostParams


class EquilibriumConfig(BaseModel):
    mode_params: ModeCostParams = ModeCostParams()
    pt_time: str = Field(PT_FREE_FLOW, description="free_flow or congested")
    mode_choice: bool = True
    epsilon_m: float = config.EPSILON_M
    epsilon_n: float = config.EPSILON_N
    epsilon_3: float = config.EPSILON_3
    max_inner: int = config.MAX_INNER_ITERATIONS
    max_outer: int = config.MAX_OUTER_ITERATIONS
    sigma1: float = config.SIGMA_1
    sigma2: float = config.SIGMA_2
    gamma_large: float = config.GAMMA_LARGE
    gamma_small: float = config.GAMMA_SMALL
    proximal_weight: float = Field(config.PROXIMAL_WEIGHT, description="curvature added per unit of Gamma in flow shifts")
    mode_step_scale: float = 1.0
    matching_step_scale: float = 1.0
    rho_floor: float = config.RHO_FLOOR
    cost_refresh: str = COST_REFRESH_GROUP
    route_shift_rounds: int = Field(3, description="segment shifts per commodity per pass")
    option_shift_rounds: int = Field(2, description="inter-option transfers per driver group per pass")
    check_invariants: bool = True

    @validator("epsilon_m", "epsilon_n", "epsilon_3")
    def tolerance_positive(cls, v):
        if v <= 0:
            raise ValueError("tolerances must be > 0")
        return v

    @validator("cost_refresh")
    def refresh_known(cls, v):
        if v not in (COST_REFRESH_GROUP, COST_REFRESH_PASS):
            raise ValueError(f"cost_refresh must be {COST_REFRESH_GROUP} or {COST_REFRESH_PASS}")
        return v


class StepRegulator(BaseModel):
    """Self-regulated averaging: theta = 1/Gamma, Gamma grows fast when the change norm grows."""
    gamma: float = 1.0
    gamma_large: float = config.GAMMA_LARGE
    gamma_small: float = config.GAMMA_SMALL
    scale: float = 1.0
    last_norm: Optional[float] = None

    @property
    def theta(self) -> float:
        return self.scale / self.gamma

    def update(self, change_norm: float) -> "StepRegulator":
        grew = self.last_norm is not None and change_norm > self.last_norm
        return self.copy(update={
            "gamma": self.gamma + (self.gamma_large if grew else self.gamma_small),
            "last_norm": change_norm,
        })


class ALParams(BaseModel):
    rho: float = 0.0
    mu_tilde: np.ndarray
    sigma1: float = config.SIGMA_1
    sigma2: float = config.SIGMA_2
    rho_floor: float = config.RHO_FLOOR
    flow_step: StepRegulator = StepRegulator()
    mode_step: StepRegulator = StepRegulator()
    matching_step: StepRegulator = StepRegulator()
    outer_iteration: int = 0
    last_violation_norm: Optional[float] = None

    class Config:
        arbitrary_types_allowed = True

    @property
    def theta(self) -> float:
        return self.flow_step.theta

    @property
    def theta1(self) -> float:
        return self.mode_step.theta

    @property
    def theta2(self) -> float:
        return self.matching_step.theta


class FlowState(BaseModel):
    """
    Decision variables. Class flows are held as link-flow arrays per commodity:
    one row per sequence level (read by the driver and every passenger on board),
    one DA-class row per od (drive-alone plus drivers who quit) and one PT-class
    row per od (public transport plus passengers who quit).
    """
    q: np.ndarray = Field(..., description="(od, mode) modal demand")
    Z: np.ndarray = Field(..., description="platform quota per sequence")
    F: np.ndarray = Field(..., description="sequence flow")
    level_flows: np.ndarray = Field(..., description="(sequence level row, link) flow")
    da_flows: np.ndarray
    pt_flows: np.ndarray
    x_veh: np.ndarray
    revision: int = 0

    class Config:
        arbitrary_types_allowed = True

    def touch(self):
        self.revision += 1

    def recompute_vehicular(self):
        self.x_veh = self.da_flows.sum(axis=0) + self.level_flows.sum(axis=0)
        self.touch()

    def clone(self) -> "FlowState":
        return FlowState(q=self.q.copy(), Z=self.Z.copy(), F=self.F.copy(), level_flows=self.level_flows.copy(),
                         da_flows=self.da_flows.copy(), pt_flows=self.pt_flows.copy(), x_veh=self.x_veh.copy(),
                         revision=self.revision)


class OptionCost(BaseModel):
    """One choice of a driver group: a sequence or quitting to drive alone."""
    sequence_id: Optional[int] = None
    flow: float = 0.0
    min_cost: float = Field(..., description="effective cost on the cheapest sequence-route")
    max_cost: float = Field(..., description="effective cost on the costliest used sequence-route")
    realized_cost: float = Field(..., description="flow-weighted effective cost")
    rd_cost: float = Field(..., description="driver route cost on the cheapest sequence-route")
    rd_realized: float = 0.0
    al_term: float = 0.0
    penalty: float = 0.0
    slot_costs: List[Tuple[Tuple[int, int], float]] = []
    min_route: Optional[SequenceRoute] = None
    max_route: Optional[SequenceRoute] = None
    multiplicity: Dict[int, int] = {}

    @property
    def is_quit(self) -> bool:
        return self.sequence_id is None


class GroupEvaluation(BaseModel):
    od_index: int
    options: List[OptionCost]
    quit_flow: float = 0.0

    def used(self, tol: float) -> List[int]:
        return [i for i, o in enumerate(self.options) if o.flow > tol]

    def clearing_cost(self, tol: float) -> float:
        used = self.used(tol)
        if not used:
            return min(o.min_cost for o in self.options)
        return max(self.options[i].min_cost for i in used)


class ModalCosts(BaseModel):
    cost: np.ndarray = Field(..., description="(od, mode) cost")
    time: np.ndarray
    distance: np.ndarray
    gamma: np.ndarray = Field(..., description="shared-distance fraction of matched drivers per od")

    class Config:
        arbitrary_types_allowed = True


class GapReport(BaseModel):
    outer_iteration: int = 0
    inner_iteration: int = 0
    g_m: float = 0.0
    g_n: float = 0.0
    al_ratio: float = 0.0
    violation: float = 0.0
    theta: float = 1.0

    @validator("g_m", "g_n", "al_ratio", "violation")
    def non_negative(cls, v):
        return max(v, 0.0)


class EquilibriumSolution(BaseModel):
    state: FlowState
    al: ALParams
    modal_costs: Optional[ModalCosts] = None
    evaluations: Dict[int, GroupEvaluation] = {}
    gaps: List[GapReport] = []
    converged: bool = False
    warm_started: bool = False
    inner_iterations: int = 0
    outer_iterations: int = 0
    invariant_violations: List[str] = []
    wall_time: float = 0.0
    problem: object = None
    forest: object = None
    snapshot: object = None

    class Config:
        arbitrary_types_allowed = True

    @property
    def last_gap(self) -> Optional[GapReport]:
        return self.gaps[-1] if self.gaps else None
