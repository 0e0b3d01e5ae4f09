"""
Initial loading and the flow bookkeeping shared by every inner step: route-level
add/remove on a commodity array and rebalancing after the mode split moved demand.
"""
from typing import Sequence, Tuple

import numpy as np

from src.assign import FLOW_TOL, logger
from src.assign.forest import BushForest
from src.assign.models import ALParams, EquilibriumConfig, FlowState, StepRegulator
from src.assign.problem import DA, PT, RD, RP, Problem
from src.bush.bush import trace_route
from src.matchgen.sequences import saving_rank
from src.netio.costs import CostSnapshot
from src.share.modes import CostLayer


def da_volumes(problem: Problem, q: np.ndarray, F: np.ndarray) -> np.ndarray:
    """DA-class volume per od: drive-alone trips plus drivers who quit."""
    return q[:, DA] + problem.quit_rd(q, F)


def pt_volumes(problem: Problem, q: np.ndarray, F: np.ndarray) -> np.ndarray:
    """PT-class volume per od: public transport trips plus unmatched passengers."""
    return q[:, PT] + problem.rp_pool(q, F)


def shift_links(flow: np.ndarray, remove: Sequence[int], add: Sequence[int], amount: float):
    """Moves `amount` from one route (or route set, repeated links counted) to another."""
    if amount <= 0:
        return
    np.subtract.at(flow, np.asarray(remove, dtype=int), amount)
    np.add.at(flow, np.asarray(add, dtype=int), amount)
    np.maximum(flow, 0.0, out=flow)


def load_min_route(forest: BushForest, snapshot: CostSnapshot, flow: np.ndarray, od: Tuple[int, int],
                   layer: CostLayer, amount: float):
    if amount <= 0:
        return
    labels = forest.min_labels(od[0], layer, snapshot)
    route = trace_route(forest.problem.network, labels, od[1])
    np.add.at(flow, np.asarray(route.links, dtype=int), amount)


def greedy_matching(problem: Problem, q: np.ndarray) -> np.ndarray:
    """
    Feasible starting quotas: sequences taken by decreasing VKT saving (then more distinct
    passenger ods, more passengers, lower id), each filled up to the remaining demand.
    """
    S = problem.num_sequences
    Z = np.zeros(S)
    if S == 0:
        return Z
    rd_left = q[:, RD].copy()
    rp_left = q[:, RP].copy()
    order = sorted(
        (n for n in range(S) if problem.R[n] > 0),
        key=lambda n: saving_rank(problem.sequences[n]),
    )
    for n in order:
        w = problem.seq_driver[n]
        room = rd_left[w]
        for wp, count in problem.seq_mult[n].items():
            room = min(room, rp_left[wp] / count)
        if room <= FLOW_TOL:
            continue
        Z[n] = room
        rd_left[w] -= room
        for wp, count in problem.seq_mult[n].items():
            rp_left[wp] -= count * room
    logger.debug(f"Greedy matching: {int((Z > 0).sum())} of {S} sequences get a quota, total {Z.sum():.1f}")
    return Z


def initial_split(problem: Problem) -> np.ndarray:
    if problem.fixed_split:
        return problem.initial_q.copy()
    q = np.zeros_like(problem.initial_q)
    share = 1.0 / len(problem.active_modes)
    for m in problem.active_modes:
        q[:, m] = problem.total * share
    return q


def initialize(problem: Problem, forest: BushForest, snapshot: CostSnapshot) -> Tuple[FlowState, ALParams]:
    """
    Even split over the available modes (or the given modal tables), a greedy feasible
    matching, no sequence flow: every driver leaves for DA and every passenger for PT.
    """
    config: EquilibriumConfig = problem.config
    W = problem.num_ods
    E = problem.network.num_links
    S = problem.num_sequences

    q = initial_split(problem)
    F = np.zeros(S)
    state = FlowState(
        q=q,
        Z=greedy_matching(problem, q),
        F=F,
        level_flows=np.zeros((problem.num_level_rows, E)),
        da_flows=np.zeros((W, E)),
        pt_flows=np.zeros((W, E)),
        x_veh=np.zeros(E),
    )
    forest.build_all(snapshot)
    da = da_volumes(problem, q, F)
    pt = pt_volumes(problem, q, F)
    for w, od in enumerate(problem.ods):
        load_min_route(forest, snapshot, state.da_flows[w], od, CostLayer.DA, da[w])
        load_min_route(forest, snapshot, state.pt_flows[w], od, CostLayer.PT, pt[w])
    state.recompute_vehicular()

    def regulator(scale: float) -> StepRegulator:
        return StepRegulator(gamma_large=config.gamma_large, gamma_small=config.gamma_small, scale=scale)

    al = ALParams(
        rho=0.0,
        mu_tilde=np.zeros(S),
        sigma1=config.sigma1,
        sigma2=config.sigma2,
        rho_floor=config.rho_floor,
        flow_step=regulator(1.0),
        mode_step=regulator(config.mode_step_scale),
        matching_step=regulator(config.matching_step_scale),
    )
    return state, al


def _rescale(problem: Problem, forest: BushForest, snapshot: CostSnapshot, flows: np.ndarray,
             old: np.ndarray, new: np.ndarray, layer: CostLayer):
    for w, od in enumerate(problem.ods):
        if abs(new[w] - old[w]) <= FLOW_TOL:
            continue
        if old[w] > FLOW_TOL:
            flows[w] *= max(new[w], 0.0) / old[w]
        else:
            flows[w] = 0.0
            load_min_route(forest, snapshot, flows[w], od, layer, new[w])


def rebalance(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, old_q: np.ndarray):
    """
    Brings class flows in line with a new modal split: sequences whose driver or passenger
    demand shrank below the matched volume are scaled down, solo classes are rescaled to
    their new volumes.
    """
    old_da = da_volumes(problem, old_q, state.F)
    old_pt = pt_volumes(problem, old_q, state.F)
    if problem.num_sequences:
        served_rd = problem.A_rd @ state.F
        served_rp = problem.A_rp @ state.F
        scale = np.ones(problem.num_sequences)
        for n in np.flatnonzero(state.F > 0):
            w = problem.seq_driver[n]
            if served_rd[w] > state.q[w, RD] + FLOW_TOL:
                scale[n] = min(scale[n], state.q[w, RD] / served_rd[w])
            for wp in problem.seq_mult[n]:
                if served_rp[wp] > state.q[wp, RP] + FLOW_TOL:
                    scale[n] = min(scale[n], state.q[wp, RP] / served_rp[wp])
        for n in np.flatnonzero(scale < 1.0):
            state.F[n] *= scale[n]
            lo, hi = problem.level_offset[n], problem.level_offset[n + 1]
            state.level_flows[lo:hi] *= scale[n]
        if np.any(scale < 1.0):
            logger.debug(f"Rebalance scaled {int((scale < 1.0).sum())} sequences down")
    _rescale(problem, forest, snapshot, state.da_flows, old_da, da_volumes(problem, state.q, state.F), CostLayer.DA)
    _rescale(problem, forest, snapshot, state.pt_flows, old_pt, pt_volumes(problem, state.q, state.F), CostLayer.PT)
    state.recompute_vehicular()
