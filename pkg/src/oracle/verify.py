"""
Residuals of the joint stable-matching and route-choice conditions for a candidate solution.
Shortest costs come from plain Dijkstra on the whole network, not from bush labels.
"""
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel

from src.netio.costs import CostSnapshot
from src.oracle import logger
from src.share.modes import CostLayer, MODE_INDEX, Mode

DA, RD, RP, PT = (MODE_INDEX[m] for m in (Mode.DA, Mode.RD, Mode.RP, Mode.PT))
FAMILIES = ["conservation", "coupling", "transfer_avoidance", "capacity", "stability", "wardrop", "acyclicity"]
EPS = 1e-9


class Residual(BaseModel):
    family: str
    value: float = 0.0
    witness: str = ""


class ResidualReport(BaseModel):
    """Largest normalized violation per constraint family, with where it happened."""
    residuals: Dict[str, Residual] = {}
    flow_scale: float = 1.0
    cost_scale: float = 1.0

    def record(self, family: str, value: float, witness: str):
        current = self.residuals.setdefault(family, Residual(family=family))
        if value > current.value:
            current.value = value
            current.witness = witness

    def worst(self) -> Residual:
        return max(self.residuals.values(), key=lambda r: r.value)

    def passed(self, tolerance: float) -> bool:
        return all(r.value <= tolerance for r in self.residuals.values())

    def rows(self) -> List[dict]:
        return [{"family": f, "value": self.residuals[f].value, "witness": self.residuals[f].witness} for f in FAMILIES]

    def format(self) -> str:
        return "\n".join(f"{r['family']:<20} {r['value']:.3e}  {r['witness']}" for r in self.rows())


class _ShortestCosts:
    def __init__(self, network, snapshot: CostSnapshot):
        self.network = network
        self.snapshot = snapshot
        self._graphs = {}
        self._dist = {}

    def __call__(self, origin: int, destination: int, layer: CostLayer) -> float:
        if origin == destination:
            return 0.0
        key = (origin, layer)
        if key not in self._dist:
            if layer not in self._graphs:
                self._graphs[layer] = self.network.to_digraph(self.snapshot.cost(layer))
            self._dist[key] = nx.single_source_dijkstra_path_length(self._graphs[layer], origin, weight="weight")
        return float(self._dist[key].get(destination, np.inf))


def _balance(network, flows: np.ndarray) -> np.ndarray:
    """Net outflow per node."""
    arrays = network.arrays
    out = np.zeros(network.num_nodes)
    np.add.at(out, arrays.tails, flows)
    np.subtract.at(out, arrays.heads, flows)
    return out


def _positive_flow_acyclic(network, flows: np.ndarray) -> bool:
    graph = nx.DiGraph()
    for i in np.flatnonzero(flows > EPS):
        link = network.links[i]
        graph.add_edge(link.tail, link.head)
    return nx.is_directed_acyclic_graph(graph)


def verify_solution(problem, state, tolerance: float = 1e-2, snapshot: Optional[CostSnapshot] = None) -> ResidualReport:
    """
    Evaluates every residual family on (problem, state). Flow residuals are divided by total
    demand and cost residuals by the mean cheapest DA cost over ods with demand.
    """
    network = problem.network
    node = network.node_index
    x = state.da_flows.sum(axis=0) + state.level_flows.sum(axis=0)
    snapshot = snapshot or problem.cost_model.evaluate(np.maximum(x, 0.0))
    shortest = _ShortestCosts(network, snapshot)
    total = problem.total_demand
    report = ResidualReport(residuals={f: Residual(family=f) for f in FAMILIES})
    if total <= EPS:
        return report
    flow_scale = total
    od_costs = [shortest(o, d, CostLayer.DA) for w, (o, d) in enumerate(problem.ods) if problem.total[w] > EPS]
    cost_scale = max(float(np.mean(od_costs)) if od_costs else 1.0, EPS)
    report.flow_scale, report.cost_scale = flow_scale, cost_scale
    S = problem.num_sequences
    served_rd = problem.A_rd @ state.F if S else np.zeros(problem.num_ods)
    served_rp = problem.A_rp @ state.F if S else np.zeros(problem.num_ods)

    # conservation: modal totals and node balance of the solo classes
    for w, od in enumerate(problem.ods):
        report.record("conservation", abs(state.q[w].sum() - problem.total[w]) / flow_scale, f"od {od} modal total")
        for name, flows, volume in (
                ("DA", state.da_flows[w], state.q[w, DA] + state.q[w, RD] - served_rd[w]),
                ("PT", state.pt_flows[w], state.q[w, PT] + state.q[w, RP] - served_rp[w])):
            b = _balance(network, flows)
            b[node[od[0]]] -= volume
            b[node[od[1]]] += volume
            report.record("conservation", float(np.abs(b).max()) / flow_scale, f"{name} class of {od}")
        for name, arr in (("q", state.q[w]), ("DA flows", state.da_flows[w]), ("PT flows", state.pt_flows[w])):
            report.record("conservation", max(0.0, -float(arr.min())) / flow_scale, f"negative {name} at {od}")

    # coupling and transfer avoidance: each level row carries F_n from task to task, nowhere else
    for n, levels in enumerate(problem.seq_levels):
        for lod in levels:
            if lod.virtual:
                continue
            row = state.level_flows[problem.level_row(n, lod.level)]
            b = _balance(network, row)
            report.record("coupling", abs(b[node[lod.origin]] - state.F[n]) / flow_scale,
                          f"sequence {n} level {lod.level} departs with {b[node[lod.origin]]:.3f}, F={state.F[n]:.3f}")
            report.record("coupling", abs(-b[node[lod.destination]] - state.F[n]) / flow_scale,
                          f"sequence {n} level {lod.level} arrives with {-b[node[lod.destination]]:.3f}")
            inner = np.ones(network.num_nodes, dtype=bool)
            inner[[node[lod.origin], node[lod.destination]]] = False
            if inner.any():
                report.record("transfer_avoidance", float(np.abs(b[inner]).max()) / flow_scale,
                              f"sequence {n} level {lod.level} gains or loses flow between tasks")
            report.record("conservation", max(0.0, -float(row.min())) / flow_scale, f"negative flow on sequence {n}")

    # capacity: quotas and the demand behind every matched participant
    if S:
        over = state.F - state.Z
        n = int(np.argmax(over))
        report.record("capacity", max(0.0, float(over[n])) / flow_scale, f"sequence {n} above its quota")
        for w, od in enumerate(problem.ods):
            report.record("capacity", max(0.0, served_rd[w] - state.q[w, RD]) / flow_scale, f"matched drivers of {od}")
            report.record("capacity", max(0.0, served_rp[w] - state.q[w, RP]) / flow_scale, f"matched passengers of {od}")
        report.record("conservation", max(0.0, -float(state.F.min())) / flow_scale, "negative sequence flow")

    _stability(problem, state, snapshot, shortest, report, served_rp, flow_scale, cost_scale)
    _wardrop(problem, state, snapshot, shortest, report, flow_scale, cost_scale)

    for w, od in enumerate(problem.ods):
        for name, flows in (("DA", state.da_flows[w]), ("PT", state.pt_flows[w])):
            if not _positive_flow_acyclic(network, flows):
                report.record("acyclicity", 1.0, f"{name} class of {od}")
    for n, levels in enumerate(problem.seq_levels):
        for lod in levels:
            if not lod.virtual and not _positive_flow_acyclic(network, state.level_flows[problem.level_row(n, lod.level)]):
                report.record("acyclicity", 1.0, f"sequence {n} level {lod.level}")

    worst = report.worst()
    logger.info(f"Verification: worst residual {worst.family} {worst.value:.3e} ({worst.witness})")
    return report


def _sequence_costs(problem, state, snapshot: CostSnapshot, shortest, n: int) -> Tuple[float, float, list, list]:
    """Realized and cheapest RD cost of a sequence, with realized and cheapest cost per passenger slot."""
    realized = cheapest = 0.0
    level_real_rp, level_min_rp = {}, {}
    for lod, layer in zip(problem.seq_levels[n], problem.seq_layers[n]):
        if lod.virtual:
            level_real_rp[lod.level] = level_min_rp[lod.level] = 0.0
            continue
        row = state.level_flows[problem.level_row(n, lod.level)]
        cheapest += shortest(lod.origin, lod.destination, layer)
        level_min_rp[lod.level] = shortest(lod.origin, lod.destination, CostLayer.RP)
        if state.F[n] > EPS:
            realized += float(row @ snapshot.cost(layer)) / state.F[n]
            level_real_rp[lod.level] = float(row @ snapshot.cost(CostLayer.RP)) / state.F[n]
        else:
            level_real_rp[lod.level] = level_min_rp[lod.level]
    if state.F[n] <= EPS:
        realized = cheapest
    slots_real = [(wp, sum(level_real_rp[l] for l in levels)) for wp, levels in problem.seq_slots[n]]
    slots_min = [(wp, sum(level_min_rp[l] for l in levels)) for wp, levels in problem.seq_slots[n]]
    return realized, cheapest, slots_real, slots_min


def _stability(problem, state, snapshot, shortest, report: ResidualReport, served_rp: np.ndarray,
               flow_scale: float, cost_scale: float):
    """
    No participant of a flow-carrying option can strictly gain by switching to another option
    that still has room: quota left, and unmatched passengers for any extra seat it needs.
    """
    S = problem.num_sequences
    if S == 0:
        return
    pt_quit = np.array([shortest(o, d, CostLayer.PT) for o, d in problem.ods])
    pool = state.q[:, RP] - served_rp
    costs = {n: _sequence_costs(problem, state, snapshot, shortest, n) for n in range(S)}

    def effective(n: int, which: int) -> float:
        rd, slots = costs[n][which], costs[n][2 + which]
        return rd + sum(max(0.0, c - pt_quit[wp]) for wp, c in slots)

    def room(src: Optional[int], dst: int) -> bool:
        if state.Z[dst] - state.F[dst] <= EPS * flow_scale:
            return False
        src_mult = problem.seq_mult[src] if src is not None else {}
        return all(pool[wp] > EPS * flow_scale for wp, c in problem.seq_mult[dst].items() if c > src_mult.get(wp, 0))

    quit_rd = problem.quit_rd(state.q, state.F)
    for w, members in problem.groups.items():
        o, d = problem.ods[w]
        quit_cost = shortest(o, d, CostLayer.DA)
        if state.da_flows[w].sum() > EPS and quit_rd[w] > EPS:
            volume = state.q[w, DA] + quit_rd[w]
            quit_real = float(state.da_flows[w] @ snapshot.cost(CostLayer.DA)) / max(volume, EPS)
            alternatives = [effective(m, 1) for m in members if room(None, m)]
            if alternatives:
                best = min(alternatives)
                report.record("stability", max(0.0, quit_real - best) / cost_scale,
                              f"drivers of {problem.ods[w]} quitting at {quit_real:.2f} could match at {best:.2f}")
        for n in members:
            if state.F[n] <= EPS:
                continue
            mine = effective(n, 0)
            alternatives = [quit_cost] + [effective(m, 1) for m in members if m != n and room(n, m)]
            best = min(alternatives)
            report.record("stability", max(0.0, mine - best) / cost_scale,
                          f"sequence {n}: driver pays {mine:.2f}, alternative {best:.2f}")

    for n in range(S):
        if state.F[n] <= EPS:
            continue
        for wp, c in costs[n][2]:
            alternatives = [pt_quit[wp]]
            for m in range(S):
                if m != n and state.F[m] > EPS and wp in problem.seq_mult[m]:
                    alternatives += [cm for wq, cm in costs[m][3] if wq == wp]
            best = min(alternatives)
            report.record("stability", max(0.0, c - best) / cost_scale,
                          f"sequence {n}: passenger of {problem.ods[wp]} pays {c:.2f}, alternative {best:.2f}")


def _wardrop(problem, state, snapshot, shortest, report: ResidualReport, flow_scale: float, cost_scale: float):
    """Flow-weighted excess of realized over shortest route cost, commodity by commodity."""
    for w, (o, d) in enumerate(problem.ods):
        for name, flows, layer in (("DA", state.da_flows[w], CostLayer.DA), ("PT", state.pt_flows[w], CostLayer.PT)):
            volume = float(_balance(problem.network, flows)[problem.network.node_index[o]])
            if volume <= EPS:
                continue
            excess = float(flows @ snapshot.cost(layer)) / volume - shortest(o, d, layer)
            report.record("wardrop", max(0.0, excess) / cost_scale, f"{name} class of {(o, d)}")
    for n, levels in enumerate(problem.seq_levels):
        if state.F[n] <= EPS:
            continue
        for lod, layer in zip(levels, problem.seq_layers[n]):
            if lod.virtual:
                continue
            row = state.level_flows[problem.level_row(n, lod.level)]
            excess = float(row @ snapshot.cost(layer)) / state.F[n] - shortest(lod.origin, lod.destination, layer)
            report.record("wardrop", max(0.0, excess) / cost_scale, f"sequence {n} level {lod.level}")
