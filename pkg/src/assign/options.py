"""
Cost evaluation of the options open to one driver od: every sequence the driver can run
and quitting to drive alone. Costs are read from sequence-bushes (chained level bushes).
"""
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from src.assign import FLOW_TOL
from src.assign.forest import BushForest, da_key, level_key, pt_key
from src.assign.models import ALParams, FlowState, GroupEvaluation, OptionCost
from src.assign.problem import Problem
from src.bush.bush import trace_route
from src.bush.models import BushLabels, Route, SequenceRoute
from src.bush.routes import sequence_routes
from src.netio.costs import CostSnapshot
from src.share.modes import CostLayer


class CommodityCost(NamedTuple):
    """Cheapest route, costliest used route and mean cost of one solo commodity."""
    min_cost: float
    max_cost: float
    realized: float
    min_route: Route
    max_route: Route


def commodity_cost(forest: BushForest, snapshot: CostSnapshot, flow: np.ndarray, od, layer: CostLayer,
                   key) -> CommodityCost:
    labels = forest.flow_labels(od[0], layer, snapshot, {key: flow})
    network = forest.problem.network
    dest = network.node_index[od[1]]
    ucost, upred = labels.max_for(key)
    min_route = trace_route(network, labels, od[1])
    max_route = trace_route(network, labels, od[1], upred)
    costs = snapshot.cost(layer)
    volume = float(flow[network.arrays.tails == network.node_index[od[0]]].sum())
    realized = float(flow @ costs) / volume if volume > FLOW_TOL else float(labels.min_cost[dest])
    return CommodityCost(float(labels.min_cost[dest]), float(ucost[dest]), realized, min_route, max_route)


def pt_quit_costs(problem: Problem, forest: BushForest, snapshot: CostSnapshot) -> np.ndarray:
    """Cheapest PT cost per od: what an unmatched passenger pays."""
    out = np.zeros(problem.num_ods)
    for w, (o, d) in enumerate(problem.ods):
        labels = forest.min_labels(o, CostLayer.PT, snapshot)
        out[w] = labels.min_cost[problem.network.node_index[d]]
    return out


def _level_labels(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, n: int):
    labels: Dict[int, BushLabels] = {}
    keys = {}
    for lod, layer in zip(problem.seq_levels[n], problem.seq_layers[n]):
        if lod.virtual:
            continue
        key = level_key(problem.level_row(n, lod.level))
        labels[lod.level] = forest.flow_labels(lod.origin, layer, snapshot, {key: state.level_flows[key[1]]})
        keys[lod.level] = key
    return labels, keys


def _route_cost(problem: Problem, snapshot: CostSnapshot, n: int, route: SequenceRoute, levels: List[int],
                layer: Optional[CostLayer] = None) -> float:
    total = 0.0
    for l in levels:
        cost = snapshot.cost(layer or problem.seq_layers[n][l - 1])
        total += route.routes[l - 1].cost(cost)
    return total


def _realized_cost(problem: Problem, snapshot: CostSnapshot, state: FlowState, n: int, levels: List[int],
                   layer: Optional[CostLayer] = None) -> float:
    total = 0.0
    for l in levels:
        cost = snapshot.cost(layer or problem.seq_layers[n][l - 1])
        total += float(state.level_flows[problem.level_row(n, l)] @ cost)
    return total / state.F[n]


def al_term(al: ALParams, state: FlowState, n: int) -> float:
    if al.rho <= 0 and al.mu_tilde[n] <= 0:
        return 0.0
    return max(0.0, al.mu_tilde[n] + al.rho * (state.F[n] - state.Z[n]))


def evaluate_sequence(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, al: ALParams,
                      n: int, quit_costs: np.ndarray) -> OptionCost:
    seq = problem.sequences[n]
    labels, keys = _level_labels(problem, forest, snapshot, state, n)
    routes = sequence_routes(seq, problem.network, labels, version=snapshot.version, keys=keys)
    all_levels = list(range(1, seq.num_levels + 1))
    used = state.F[n] > FLOW_TOL
    extra = al_term(al, state, n)

    def penalty(route: Optional[SequenceRoute]) -> Tuple[float, list]:
        total, slots = 0.0, []
        for wp, levels in problem.seq_slots[n]:
            if route is None:
                c = _realized_cost(problem, snapshot, state, n, levels, CostLayer.RP)
            else:
                c = _route_cost(problem, snapshot, n, route, levels, CostLayer.RP)
            slots.append((problem.ods[wp], c))
            total += max(0.0, c - quit_costs[wp])
        return total, slots

    min_pen, min_slots = penalty(routes.min_route)
    max_pen, _ = penalty(routes.max_route)
    if used:
        rd_realized = _realized_cost(problem, snapshot, state, n, all_levels)
        real_pen, real_slots = penalty(None)
    else:
        rd_realized, real_pen, real_slots = routes.min_cost, min_pen, min_slots
    return OptionCost(
        sequence_id=n,
        flow=float(state.F[n]),
        min_cost=routes.min_cost + extra + min_pen,
        max_cost=routes.max_cost + extra + max_pen,
        realized_cost=rd_realized + extra + real_pen,
        rd_cost=routes.min_cost,
        rd_realized=rd_realized,
        al_term=extra,
        penalty=real_pen,
        slot_costs=real_slots,
        min_route=routes.min_route,
        max_route=routes.max_route,
        multiplicity=problem.seq_mult[n],
    )


def evaluate_quit(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, w: int,
                  quit_flow: float) -> OptionCost:
    cc = commodity_cost(forest, snapshot, state.da_flows[w], problem.ods[w], CostLayer.DA, da_key(w))
    return OptionCost(
        sequence_id=None,
        flow=quit_flow,
        min_cost=cc.min_cost,
        max_cost=cc.max_cost,
        realized_cost=cc.realized,
        rd_cost=cc.min_cost,
        rd_realized=cc.realized,
        min_route=SequenceRoute(routes=[cc.min_route]),
        max_route=SequenceRoute(routes=[cc.max_route]),
    )


def evaluate_group(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, al: ALParams,
                   w: int, quit_costs: Optional[np.ndarray] = None) -> GroupEvaluation:
    """Options of driver od `w`: its sequences in id order, then the quit option last."""
    if quit_costs is None:
        quit_costs = pt_quit_costs(problem, forest, snapshot)
    options = [evaluate_sequence(problem, forest, snapshot, state, al, n, quit_costs) for n in problem.groups.get(w, [])]
    quit_flow = float(problem.quit_rd(state.q, state.F)[w])
    options.append(evaluate_quit(problem, forest, snapshot, state, w, quit_flow))
    return GroupEvaluation(od_index=w, options=options, quit_flow=quit_flow)


def evaluate_all(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState,
                 al: ALParams) -> Dict[int, GroupEvaluation]:
    quit_costs = pt_quit_costs(problem, forest, snapshot)
    return {w: evaluate_group(problem, forest, snapshot, state, al, w, quit_costs) for w in sorted(problem.groups)}


def admissible(problem: Problem, state: FlowState, src: OptionCost, dst: OptionCost) -> bool:
    """A transfer src -> dst needs every passenger od that dst uses more of to have unmatched passengers."""
    pool = problem.rp_pool(state.q, state.F)
    for wp, count in dst.multiplicity.items():
        if count > src.multiplicity.get(wp, 0) and pool[wp] <= FLOW_TOL:
            return False
    return True


def max_transfer(problem: Problem, state: FlowState, w: int, src: OptionCost, dst: OptionCost) -> float:
    """Largest volume that can leave the costliest used route of src and board dst."""
    network_flows = []
    if src.is_quit:
        flows = state.da_flows[w]
        links = src.max_route.routes[0].links
        network_flows.append(float(flows[links].min()) if links else 0.0)
        network_flows.append(float(problem.quit_rd(state.q, state.F)[w]))
    else:
        n = src.sequence_id
        network_flows.append(float(state.F[n]))
        for lod in problem.seq_levels[n]:
            links = src.max_route.routes[lod.level - 1].links
            if links:
                network_flows.append(float(state.level_flows[problem.level_row(n, lod.level)][links].min()))
    limit = max(0.0, min(network_flows))
    pool = problem.rp_pool(state.q, state.F)
    for wp, count in dst.multiplicity.items():
        more = count - src.multiplicity.get(wp, 0)
        if more > 0:
            limit = min(limit, max(0.0, pool[wp]) / more)
    return limit



def admissible_min(problem: Problem, state: FlowState, evaluation: GroupEvaluation, src: OptionCost) -> float:
    return min(o.min_cost for o in evaluation.options if o is src or admissible(problem, state, src, o))


def solo_costs(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState):
    """CommodityCost of the DA and PT class of every od."""
    da, pt = {}, {}
    for w, od in enumerate(problem.ods):
        da[w] = commodity_cost(forest, snapshot, state.da_flows[w], od, CostLayer.DA, da_key(w))
        pt[w] = commodity_cost(forest, snapshot, state.pt_flows[w], od, CostLayer.PT, pt_key(w))
    return da, pt
