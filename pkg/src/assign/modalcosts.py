from typing import Dict, List

import numpy as np

from src.assign import FLOW_TOL
from src.assign.models import FlowState, GroupEvaluation, ModalCosts, OptionCost
from src.assign.options import CommodityCost, admissible
from src.assign.problem import DA, PT, RD, RP, Problem
from src.netio.costs import CostSnapshot


def generalized_costs(evaluation: GroupEvaluation) -> List[float]:
    """
    Shadow-priced cost per option: a used sequence adds the scarcity price
    (clearing cost minus the cheapest used sequence cost); quit and unused options keep their own.
    """
    clearing = evaluation.clearing_cost(FLOW_TOL)
    used_seq = [o.min_cost for o in evaluation.options if not o.is_quit and o.flow > FLOW_TOL]
    floor = min(used_seq) if used_seq else clearing
    out = []
    for o in evaluation.options:
        if o.is_quit or o.flow <= FLOW_TOL:
            out.append(o.min_cost)
        else:
            out.append(o.min_cost + clearing - floor)
    return out


def _route_totals(problem: Problem, snapshot: CostSnapshot, option: OptionCost):
    arrays = problem.network.arrays
    links = option.min_route.link_union()
    time = float(snapshot.times[links].sum()) if links else 0.0
    dist = float(arrays.length[links].sum()) if links else 0.0
    shared = 0.0
    if not option.is_quit:
        n = option.sequence_id
        for lod, status in zip(problem.seq_levels[n], problem.sequences[n].status):
            level_links = option.min_route.routes[lod.level - 1].links
            if status >= 0 and level_links:
                shared += float(arrays.length[level_links].sum())
    return time, dist, shared


def compute_modal_costs(problem: Problem, snapshot: CostSnapshot, state: FlowState,
                        evaluations: Dict[int, GroupEvaluation], da: Dict[int, CommodityCost],
                        pt: Dict[int, CommodityCost]) -> ModalCosts:
    """
    DA and PT read the cheapest route. RD reads the clearing cost of the driver group and RP the
    flow-weighted mean of what matched and unmatched passengers pay.
    """
    W = problem.num_ods
    arrays = problem.network.arrays
    cost = np.zeros((W, 4))
    time = np.zeros((W, 4))
    distance = np.zeros((W, 4))
    gamma = np.zeros(W)

    for w in range(W):
        for m, cc, times in ((DA, da[w], snapshot.times), (PT, pt[w], snapshot.pt_times)):
            links = cc.min_route.links
            cost[w, m] = cc.min_cost
            time[w, m] = float(times[links].sum()) if links else 0.0
            distance[w, m] = float(arrays.length[links].sum()) if links else 0.0
        # no sequence: the driver can only quit to drive alone
        cost[w, RD], time[w, RD], distance[w, RD] = cost[w, DA], time[w, DA], distance[w, DA]
        cost[w, RP], time[w, RP], distance[w, RP] = cost[w, PT], time[w, PT], distance[w, PT]

    for w, evaluation in evaluations.items():
        options = evaluation.options
        quit_option = options[-1]
        if state.q[w, RD] > FLOW_TOL:
            cost[w, RD] = evaluation.clearing_cost(FLOW_TOL)
        else:
            cost[w, RD] = min(o.min_cost for o in options if admissible(problem, state, quit_option, o))
        weight = t_sum = d_sum = shared_sum = 0.0
        for o in options:
            if o.flow <= FLOW_TOL:
                continue
            t, d, s = _route_totals(problem, snapshot, o)
            weight += o.flow
            t_sum += o.flow * t
            d_sum += o.flow * d
            if not o.is_quit:
                shared_sum += o.flow * s
        if weight > FLOW_TOL:
            time[w, RD] = t_sum / weight
            distance[w, RD] = d_sum / weight
        matched = [(o.flow, _route_totals(problem, snapshot, o)) for o in options if not o.is_quit and o.flow > FLOW_TOL]
        matched_dist = sum(f * d for f, (_, d, _) in matched)
        if matched_dist > 0:
            gamma[w] = min(1.0, sum(f * s for f, (_, _, s) in matched) / matched_dist)

    # passengers: matched slots plus the unmatched pool on PT
    pool = problem.rp_pool(state.q, state.F) if problem.num_sequences else state.q[:, RP]
    num = np.zeros(W)
    den = np.zeros(W)
    best_slot = np.full(W, np.inf)
    for evaluation in evaluations.values():
        for o in evaluation.options:
            if o.is_quit:
                continue
            for od, c in o.slot_costs:
                wp = problem.od_index[tuple(od)]
                best_slot[wp] = min(best_slot[wp], c)
                if o.flow > FLOW_TOL:
                    num[wp] += o.flow * c
                    den[wp] += o.flow
    num += np.maximum(pool, 0.0) * cost[:, PT]
    den += np.maximum(pool, 0.0)
    for w in range(W):
        if den[w] > FLOW_TOL:
            cost[w, RP] = num[w] / den[w]
        else:
            cost[w, RP] = min(cost[w, PT], best_slot[w])
    return ModalCosts(cost=cost, time=time, distance=distance, gamma=gamma)
