from typing import Dict

import numpy as np

from src.assign import FLOW_TOL
from src.assign.loading import da_volumes, pt_volumes
from src.assign.models import ALParams, FlowState, GapReport, GroupEvaluation, ModalCosts
from src.assign.modesplit import cheapest_mode
from src.assign.options import CommodityCost, admissible_min
from src.assign.problem import DA, Problem
from src.netio.costs import CostSnapshot
from src.share.modes import CostLayer


def modal_gap(problem: Problem, q: np.ndarray, costs: np.ndarray) -> float:
    """Demand-weighted excess over the cheapest mode, per unit of total demand."""
    total = q.sum()
    if total <= FLOW_TOL or not problem.mode_choice:
        return 0.0
    num = 0.0
    for w in range(q.shape[0]):
        best = costs[w, cheapest_mode(costs[w], problem.active_modes)]
        for m in problem.active_modes:
            num += q[w, m] * max(costs[w, m] - best, 0.0)
    return num / total


def route_gap(problem: Problem, snapshot: CostSnapshot, state: FlowState, evaluations: Dict[int, GroupEvaluation],
              da: Dict[int, CommodityCost], pt: Dict[int, CommodityCost]) -> float:
    """
    Total-cost excess over cheapest routes and cheapest admissible options, per unit of total
    demand. Drivers who quit are counted once, through their group.
    """
    total = state.q.sum()
    if total <= FLOW_TOL:
        return 0.0
    da_volume = da_volumes(problem, state.q, state.F)
    pt_volume = pt_volumes(problem, state.q, state.F)
    da_cost = snapshot.cost(CostLayer.DA)
    pt_cost = snapshot.cost(CostLayer.PT)
    num = 0.0
    for w in range(problem.num_ods):
        if da_volume[w] > FLOW_TOL:
            excess = float(state.da_flows[w] @ da_cost) - da_volume[w] * da[w].min_cost
            weight = state.q[w, DA] / da_volume[w] if w in evaluations else 1.0
            num += max(excess, 0.0) * weight
        if pt_volume[w] > FLOW_TOL:
            num += max(float(state.pt_flows[w] @ pt_cost) - pt_volume[w] * pt[w].min_cost, 0.0)
    for evaluation in evaluations.values():
        for o in evaluation.options:
            if o.flow <= FLOW_TOL:
                continue
            best = admissible_min(problem, state, evaluation, o)
            num += o.flow * max(o.realized_cost - best, 0.0)
    return num / total


def al_value(al: ALParams, h: np.ndarray) -> float:
    if al.rho <= 0:
        return float(al.mu_tilde @ h) if len(h) else 0.0
    shifted = np.maximum(al.mu_tilde + al.rho * h, 0.0)
    return float((shifted ** 2 - al.mu_tilde ** 2).sum() / (2.0 * al.rho))


def al_ratio(al: ALParams, h: np.ndarray, g: float) -> float:
    """Share of the penalty term in the penalized objective: |A| / (|A| + g)."""
    a = abs(al_value(al, h))
    if a + g <= 0:
        return 0.0
    return a / (a + g)


def compute_gaps(problem: Problem, snapshot: CostSnapshot, state: FlowState, modal: ModalCosts,
                 evaluations: Dict[int, GroupEvaluation], da: Dict[int, CommodityCost], pt: Dict[int, CommodityCost],
                 al: ALParams) -> GapReport:
    g_n = route_gap(problem, snapshot, state, evaluations, da, pt)
    h = state.F - state.Z
    return GapReport(
        outer_iteration=al.outer_iteration,
        g_m=modal_gap(problem, state.q, modal.cost),
        g_n=g_n,
        al_ratio=al_ratio(al, h, g_n * state.q.sum()),
        violation=float(np.maximum(h, 0.0).sum()) if len(h) else 0.0,
        theta=al.theta,
    )
