"""
Flow shifting on sequence-bushes. Within one commodity, flow moves from the costliest used
route to the cheapest bush route; between options of one driver group, a whole sequence-route
(the driver and every passenger on board together) moves from the costliest used option to
the cheapest admissible one.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.assign import FLOW_TOL, logger
from src.assign.forest import BushForest, da_key, level_key, pt_key
from src.assign.loading import load_min_route, pt_volumes
from src.assign.models import ALParams, FlowState, GroupEvaluation, OptionCost
from src.assign.options import admissible, evaluate_group, max_transfer, pt_quit_costs
from src.assign.problem import Problem
from src.bush import COST_EPS
from src.bush.bush import trace_route
from src.netio.costs import CostSnapshot
from src.netio.models import OD
from src.share.modes import CostLayer


def curvature(snapshot: CostSnapshot, a_time: float, remove: Sequence[int], add: Sequence[int]) -> float:
    """Second derivative of the vehicle cost along the direction remove -> add."""
    change = np.zeros(len(snapshot.derivatives))
    np.add.at(change, np.asarray(add, dtype=int), 1.0)
    np.subtract.at(change, np.asarray(remove, dtype=int), 1.0)
    return float(a_time * (change ** 2 * snapshot.derivatives).sum())


def proximal_step(gap: float, hessian: float, al: ALParams, weight: float) -> float:
    return gap / (hessian + weight * al.flow_step.gamma)


def _move(flow: np.ndarray, links: Sequence[int], amount: float):
    if links:
        np.add.at(flow, np.asarray(links, dtype=int), amount)


def equilibrate_commodity(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState,
                          al: ALParams, flow: np.ndarray, od: OD, layer: CostLayer, key,
                          vehicular: bool = True) -> float:
    """Shifts one commodity from its costliest used route to its cheapest; returns the volume moved."""
    config = problem.config
    network = problem.network
    dest = network.node_index[od[1]]
    a_time = snapshot.time_coefficients[layer] if vehicular else 0.0
    moved = 0.0
    for _ in range(config.route_shift_rounds):
        labels = forest.flow_labels(od[0], layer, snapshot, {key: flow})
        ucost, upred = labels.max_for(key)
        gap = float(ucost[dest] - labels.min_cost[dest])
        if gap <= COST_EPS:
            break
        cheap = trace_route(network, labels, od[1]).links
        dear = trace_route(network, labels, od[1], upred).links
        only_dear = sorted(set(dear) - set(cheap))
        if not only_dear:
            break
        limit = float(flow[only_dear].min())
        step = min(limit, proximal_step(gap, curvature(snapshot, a_time, dear, cheap), al, config.proximal_weight))
        if step <= FLOW_TOL:
            break
        _move(flow, dear, -step)
        _move(flow, cheap, step)
        np.maximum(flow, 0.0, out=flow)
        if vehicular:
            _move(state.x_veh, dear, -step)
            _move(state.x_veh, cheap, step)
        moved += step
        if step < limit:
            # limited by the proximal step: a repeat would reuse stale costs
            break
    if moved:
        state.touch()
    return moved


def equilibrate_levels(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState,
                       al: ALParams, n: int) -> float:
    moved = 0.0
    for lod, layer in zip(problem.seq_levels[n], problem.seq_layers[n]):
        if lod.virtual:
            continue
        row = problem.level_row(n, lod.level)
        moved += equilibrate_commodity(problem, forest, snapshot, state, al, state.level_flows[row],
                                       (lod.origin, lod.destination), layer, level_key(row))
    return moved


def _vehicle_links(option: OptionCost, which: str) -> List[int]:
    route = option.max_route if which == "max" else option.min_route
    return route.link_union() if route is not None else []


def _pick_transfer(problem: Problem, state: FlowState, evaluation: GroupEvaluation) -> Optional[Tuple[int, int]]:
    """
    Source: the costliest used option that has a cheaper admissible target. Target: the
    cheapest option admissible from that source. Ties go to the lowest option index.
    """
    options = evaluation.options
    used = sorted(evaluation.used(FLOW_TOL), key=lambda i: (-options[i].max_cost, i))
    for i in used:
        src = options[i]
        targets = [j for j, o in enumerate(options) if j != i and admissible(problem, state, src, o)]
        if not targets:
            continue
        j = min(targets, key=lambda k: (options[k].min_cost, k))
        if src.max_cost - options[j].min_cost > COST_EPS:
            return i, j
    return None


def apply_transfer(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, w: int,
                   src: OptionCost, dst: OptionCost, amount: float):
    """Moves `amount` from the costliest route of src to the cheapest route of dst, passengers included."""
    pt_volume = pt_volumes(problem, state.q, state.F)

    def shift(option: OptionCost, sign: float, which: str):
        route = option.max_route if which == "max" else option.min_route
        if option.is_quit:
            links = route.routes[0].links
            _move(state.da_flows[w], links, sign * amount)
            _move(state.x_veh, links, sign * amount)
            return
        n = option.sequence_id
        for lod in problem.seq_levels[n]:
            links = route.routes[lod.level - 1].links
            _move(state.level_flows[problem.level_row(n, lod.level)], links, sign * amount)
            _move(state.x_veh, links, sign * amount)
        state.F[n] += sign * amount

    shift(src, -1.0, "max")
    shift(dst, 1.0, "min")

    for wp in set(src.multiplicity) | set(dst.multiplicity):
        more = dst.multiplicity.get(wp, 0) - src.multiplicity.get(wp, 0)
        if more > 0 and pt_volume[wp] > FLOW_TOL:
            state.pt_flows[wp] *= max(pt_volume[wp] - more * amount, 0.0) / pt_volume[wp]
        elif more < 0:
            load_min_route(forest, snapshot, state.pt_flows[wp], problem.ods[wp], CostLayer.PT, -more * amount)
    np.maximum(state.F, 0.0, out=state.F)
    for flows in (state.da_flows, state.level_flows):
        np.maximum(flows, 0.0, out=flows)
    np.maximum(state.x_veh, 0.0, out=state.x_veh)
    state.touch()


def push_group_flows(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState,
                     al: ALParams, w: int, quit_costs: Optional[np.ndarray] = None) -> float:
    """
    One proximal pass over the group of driver od `w`: levels of every used sequence are
    equilibrated first, then flow moves between options. Returns the volume moved.
    """
    config = problem.config
    if quit_costs is None:
        quit_costs = pt_quit_costs(problem, forest, snapshot)
    moved = 0.0
    for n in problem.groups.get(w, []):
        if state.F[n] > FLOW_TOL:
            moved += equilibrate_levels(problem, forest, snapshot, state, al, n)

    a_time = snapshot.time_coefficients[CostLayer.DA]
    for _ in range(config.option_shift_rounds):
        evaluation = evaluate_group(problem, forest, snapshot, state, al, w, quit_costs)
        pick = _pick_transfer(problem, state, evaluation)
        if pick is None:
            break
        src, dst = evaluation.options[pick[0]], evaluation.options[pick[1]]
        gap = src.max_cost - dst.min_cost
        limit = max_transfer(problem, state, w, src, dst)
        hessian = curvature(snapshot, a_time, _vehicle_links(src, "max"), _vehicle_links(dst, "min"))
        hessian += al.rho * (int(not src.is_quit and src.al_term > 0) + int(not dst.is_quit and dst.al_term > 0))
        step = min(limit, proximal_step(gap, hessian, al, config.proximal_weight))
        if step <= FLOW_TOL:
            break
        apply_transfer(problem, forest, snapshot, state, w, src, dst, step)
        moved += step
        logger.debug(f"group {problem.ods[w]}: moved {step:.3f} from {_name(src)} to {_name(dst)} (gap {gap:.4f})")
        if step < limit:
            break
    return moved


def _name(option: OptionCost) -> str:
    return "quit" if option.is_quit else f"n{option.sequence_id}"


def push_solo_flows(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState,
                    al: ALParams) -> float:
    """Route equilibration of the DA class and the PT class of every od."""
    moved = 0.0
    for w, od in enumerate(problem.ods):
        if state.da_flows[w].any():
            moved += equilibrate_commodity(problem, forest, snapshot, state, al, state.da_flows[w], od,
                                           CostLayer.DA, da_key(w))
        if state.pt_flows[w].any():
            moved += equilibrate_commodity(problem, forest, snapshot, state, al, state.pt_flows[w], od,
                                           CostLayer.PT, pt_key(w), vehicular=False)
    return moved


def push_all(problem: Problem, forest: BushForest, snapshot: CostSnapshot, state: FlowState, al: ALParams,
             refresh=None) -> Dict[str, float]:
    """
    Group pushes in ascending driver-od order, then the solo classes. `refresh(state)` returns
    a new cost snapshot; it is called after every group when given.
    """
    moved_groups = 0.0
    for w in sorted(problem.groups):
        moved_groups += push_group_flows(problem, forest, snapshot, state, al, w)
        if refresh is not None:
            snapshot = refresh(state)
    moved_solo = push_solo_flows(problem, forest, snapshot, state, al)
    return {"groups": moved_groups, "solo": moved_solo}
