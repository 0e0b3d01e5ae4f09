"""
Reference equilibrium over enumerated routes by the method of successive averages.
Independent of the bush machinery: every od, mode and sequence-route is an explicit
column, and each iteration averages toward an all-or-nothing, quota-respecting target.
"""
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy.optimize import linprog

from src import config
from src.matchgen.models import SequencePool
from src.netio.costs import PT_FREE_FLOW, CostModel, CostSnapshot
from src.netio.models import OD, DemandTable, ModeCostParams, Network
from src.oracle import MAX_MSA_ITERATIONS, OracleSizeError, logger
from src.oracle.routes import enumerate_paths, enumerate_sequence_routes, incidence
from src.share.modes import ALL_MODES, BASELINE_MODES, MODE_INDEX, CostLayer, Mode

DA, RD, RP, PT = (MODE_INDEX[m] for m in ALL_MODES)
EPS = 1e-9


class OracleEquilibrium(BaseModel):
    ods: List[OD]
    q: np.ndarray
    Z: np.ndarray
    F: np.ndarray
    x_veh: np.ndarray
    times: np.ndarray
    modal_costs: np.ndarray
    option_costs: Dict[int, float] = {}
    rd_costs: Dict[int, float] = {}
    slot_costs: Dict[int, List[Tuple[OD, float]]] = {}
    quit_costs: Dict[OD, float] = {}
    quit_flows: Dict[OD, float] = {}
    iterations: int = 0
    gap: float = 0.0
    converged: bool = False

    class Config:
        arbitrary_types_allowed = True


def platform_lp(R: np.ndarray, A_rd: np.ndarray, A_rp: np.ndarray, q_rd: np.ndarray, q_rp: np.ndarray) -> np.ndarray:
    """Quotas maximizing total VKT saving within the RD and RP demand."""
    if len(R) == 0:
        return np.zeros(0)
    result = linprog(-R, A_ub=np.vstack([A_rd, A_rp]), b_ub=np.concatenate([q_rd, q_rp]),
                     bounds=[(0, None)] * len(R), method="highs")
    if not result.success:
        raise RuntimeError(f"platform LP failed: {result.message}")
    return np.maximum(result.x, 0.0)


class _SequenceColumns:
    """Per-level path incidences of one sequence; flows live on the product grid."""

    def __init__(self, seq, network: Network, hop_limit: Optional[int], budget: int):
        self.seq = seq
        self.routes = enumerate_sequence_routes(seq, network, hop_limit, budget)
        self.sizes = self.routes.sizes
        self.matrices = [incidence(self.routes.paths[lod.level], network.num_links) for lod in self.routes.levels]
        self.layers = [CostLayer.RD_EMPTY if b < 0 else CostLayer.RD_SHARED for b in seq.status]
        self.flows = np.zeros(self.sizes)

    def _grid(self, per_level: List[np.ndarray]) -> np.ndarray:
        total = np.zeros(self.sizes)
        L = len(self.sizes)
        for axis, values in enumerate(per_level):
            shape = [1] * L
            shape[axis] = len(values)
            total = total + values.reshape(shape)
        return total

    def cost_grids(self, snapshot: CostSnapshot):
        """RD cost and per-passenger RP cost of every sequence-route."""
        rd = self._grid([M @ snapshot.cost(layer) for M, layer in zip(self.matrices, self.layers)])
        rp_levels = [M @ snapshot.cost(CostLayer.RP) for M in self.matrices]
        slots = []
        for slot in self.seq.passengers:
            per_level = [v if (i + 1) in slot.levels else np.zeros_like(v) for i, v in enumerate(rp_levels)]
            slots.append((slot.od, self._grid(per_level)))
        return rd, slots

    def link_flows(self, grid: np.ndarray) -> np.ndarray:
        out = np.zeros(self.matrices[0].shape[1])
        L = len(self.sizes)
        for axis, M in enumerate(self.matrices):
            marginal = grid.sum(axis=tuple(a for a in range(L) if a != axis))
            out += M.T @ marginal
        return out


def _check_size(network: Network, pool: SequencePool, max_nodes: int, max_sequences: int):
    if network.num_nodes > max_nodes:
        raise OracleSizeError(f"{network.num_nodes} nodes exceed the oracle limit of {max_nodes}")
    if len(pool) > max_sequences:
        raise OracleSizeError(f"{len(pool)} sequences exceed the oracle limit of {max_sequences}")


def brute_force_equilibrium(network: Network, demands: Union[DemandTable, Mapping[Mode, DemandTable]],
                            pool: Optional[SequencePool] = None, params: Optional[ModeCostParams] = None,
                            pt_time: str = PT_FREE_FLOW, Z: Optional[np.ndarray] = None, tolerance: float = 1e-4,
                            hop_limit: Optional[int] = None, max_iterations: int = MAX_MSA_ITERATIONS,
                            max_nodes: int = config.ORACLE_MAX_NODES,
                            max_sequences: int = config.ORACLE_MAX_SEQUENCES,
                            budget: int = config.ORACLE_ROUTE_BUDGET) -> OracleEquilibrium:
    """
    MSA over enumerated columns until the relative gap (excess total cost over the target,
    per unit demand and mean od cost) falls under `tolerance`. A fixed modal table freezes
    the mode split; an aggregate table lets modes be averaged too.
    """
    pool = pool or SequencePool()
    params = params or ModeCostParams()
    _check_size(network, pool, max_nodes, max_sequences)
    sequences = pool.sequences

    fixed = not isinstance(demands, DemandTable)
    tables = {Mode(m): t for m, t in demands.items()} if fixed else {Mode.DA: demands}
    od_set = set()
    for table in tables.values():
        od_set.update(table.ods)
    for seq in sequences:
        od_set.add(seq.driver_od)
        od_set.update(seq.passenger_ods)
    ods = sorted(od_set)
    index = {od: i for i, od in enumerate(ods)}
    W, S, E = len(ods), len(sequences), network.num_links
    network = network.with_endpoints(ods)
    model = CostModel(network, params, pt_time)

    q = np.zeros((W, 4))
    for mode, table in tables.items():
        for od, value in table.demands.items():
            q[index[od], MODE_INDEX[mode]] += value
    total = q.sum(axis=1)
    active = [MODE_INDEX[m] for m in (ALL_MODES if sequences else BASELINE_MODES)]
    if not fixed:
        q = np.zeros((W, 4))
        for m in active:
            q[:, m] = total / len(active)

    driver = np.array([index[s.driver_od] for s in sequences], dtype=int)
    mult = [{index[od]: c for od, c in s.multiplicity().items()} for s in sequences]
    A_rd = np.zeros((W, S))
    A_rp = np.zeros((W, S))
    for n in range(S):
        A_rd[driver[n], n] = 1.0
        for wp, c in mult[n].items():
            A_rp[wp, n] = c
    if Z is None:
        Z = platform_lp(np.array([s.r_value for s in sequences]), A_rd, A_rp, q[:, RD], q[:, RP])
    Z = np.asarray(Z, dtype=float)

    od_paths = [enumerate_paths(network, o, d, None, budget) for o, d in ods]
    od_matrices = [incidence(paths, E) for paths in od_paths]
    da_flows = [np.zeros(len(p)) for p in od_paths]
    pt_flows = [np.zeros(len(p)) for p in od_paths]
    columns = [_SequenceColumns(s, network, hop_limit, budget) for s in sequences]
    groups: Dict[int, List[int]] = {}
    for n in range(S):
        groups.setdefault(int(driver[n]), []).append(n)

    gap = np.inf
    k = 0
    converged = False
    for k in range(1, max_iterations + 1):
        x = sum((M.T @ f for M, f in zip(od_matrices, da_flows)), np.zeros(E))
        for col in columns:
            x += col.link_flows(col.flows)
        snapshot = model.evaluate(x)
        da_cost = [M @ snapshot.cost(CostLayer.DA) for M in od_matrices]
        pt_cost = [M @ snapshot.cost(CostLayer.PT) for M in od_matrices]
        pt_min = np.array([c.min() for c in pt_cost])
        da_min = np.array([c.min() for c in da_cost])

        option_grids = []
        for col in columns:
            rd, slots = col.cost_grids(snapshot)
            effective = rd.copy()
            for od, grid in slots:
                effective += np.maximum(grid - pt_min[index[od]], 0.0)
            option_grids.append((effective, rd, slots))

        # quota- and pool-respecting all-or-nothing target
        F_target = np.zeros(S)
        pool_left = q[:, RP].copy()
        clearing = da_min.copy()
        for w in sorted(groups):
            options = [(float(option_grids[n][0].min()), i, n) for i, n in enumerate(groups[w])]
            options.append((float(da_min[w]), len(options), None))
            remaining = q[w, RD]
            for cost, _, n in sorted(options):
                if remaining <= EPS:
                    break
                if n is None:
                    clearing[w] = cost
                    remaining = 0.0
                    break
                room = Z[n]
                for wp, c in mult[n].items():
                    room = min(room, pool_left[wp] / c)
                amount = min(remaining, max(room, 0.0))
                if amount > EPS:
                    F_target[n] = amount
                    remaining -= amount
                    clearing[w] = cost
                    for wp, c in mult[n].items():
                        pool_left[wp] -= c * amount

        quit_target = q[:, RD] - A_rd @ F_target
        pool_target = q[:, RP] - A_rp @ F_target
        tc_now = tc_target = 0.0
        for w in range(W):
            tc_now += da_flows[w] @ da_cost[w] + pt_flows[w] @ pt_cost[w]
            tc_target += (q[w, DA] + quit_target[w]) * da_min[w] + (q[w, PT] + pool_target[w]) * pt_min[w]
        for n, col in enumerate(columns):
            tc_now += float((col.flows * option_grids[n][0]).sum())
            tc_target += F_target[n] * float(option_grids[n][0].min())

        modal = _modal_costs(W, da_min, pt_min, clearing, groups, option_grids, F_target, pool_target, index)
        q_target = q
        if not fixed:
            q_target = np.zeros_like(q)
            for w in range(W):
                best = min(active, key=lambda m: (modal[w, m], m))
                q_target[w, best] = total[w]
            tc_now += float((q * modal).sum())
            tc_target += float((q_target * modal).sum())

        demand = total.sum()
        scale = max(demand * float(np.mean(da_min[total > 0])) if demand > 0 else 1.0, EPS)
        gap = (tc_now - tc_target) / scale
        if k > 1 and gap <= tolerance:
            converged = True
            break

        step = 1.0 / k
        for w in range(W):
            target = np.zeros(len(od_paths[w]))
            target[int(np.argmin(da_cost[w]))] = q[w, DA] + quit_target[w]
            da_flows[w] += step * (target - da_flows[w])
            target = np.zeros(len(od_paths[w]))
            target[int(np.argmin(pt_cost[w]))] = q[w, PT] + pool_target[w]
            pt_flows[w] += step * (target - pt_flows[w])
        for n, col in enumerate(columns):
            target = np.zeros(col.sizes)
            target[np.unravel_index(int(np.argmin(option_grids[n][0])), col.sizes)] = F_target[n]
            col.flows += step * (target - col.flows)
        if not fixed:
            q = q + step * (q_target - q)
            _fit_to_split(q, columns, driver, mult, A_rd, da_flows, pt_flows)

    if not converged:
        logger.warning(f"MSA stopped after {k} iterations with relative gap {gap:.3e}")
    F = np.array([col.flows.sum() for col in columns]) if S else np.zeros(0)
    quit_flows = q[:, RD] - A_rd @ F
    result = OracleEquilibrium(
        ods=ods, q=q, Z=Z, F=F, x_veh=snapshot.x_veh, times=snapshot.times, modal_costs=modal,
        iterations=k, gap=float(gap), converged=converged,
        quit_costs={od: float(da_min[w]) for w, od in enumerate(ods)},
        quit_flows={od: float(quit_flows[w]) for w, od in enumerate(ods)},
    )
    for n, col in enumerate(columns):
        effective, rd, slots = option_grids[n]
        best = np.unravel_index(int(np.argmin(effective)), col.sizes)
        result.option_costs[n] = float(effective[best])
        result.rd_costs[n] = float(rd[best])
        result.slot_costs[n] = [(od, float(grid[best])) for od, grid in slots]
    logger.info(f"MSA reference: {k} iterations, gap {gap:.3e}, F = {np.round(F, 3).tolist()}")
    return result


def _modal_costs(W: int, da_min: np.ndarray, pt_min: np.ndarray, clearing: np.ndarray, groups, option_grids,
                 F_target: np.ndarray, pool_target: np.ndarray, index: Dict[OD, int]) -> np.ndarray:
    modal = np.zeros((W, 4))
    modal[:, DA] = da_min
    modal[:, PT] = pt_min
    modal[:, RD] = clearing
    num = np.maximum(pool_target, 0.0) * pt_min
    den = np.maximum(pool_target, 0.0)
    best = pt_min.copy()
    for w, members in groups.items():
        for n in members:
            effective, _, slots = option_grids[n]
            at = np.unravel_index(int(np.argmin(effective)), effective.shape)
            for od, grid in slots:
                wp = index[od]
                best[wp] = min(best[wp], float(grid[at]))
                num[wp] += F_target[n] * float(grid[at])
                den[wp] += F_target[n]
    modal[:, RP] = np.where(den > EPS, num / np.maximum(den, EPS), best)
    return modal


def _fit_to_split(q: np.ndarray, columns: List[_SequenceColumns], driver: np.ndarray, mult, A_rd: np.ndarray,
                  da_flows: List[np.ndarray], pt_flows: List[np.ndarray]):
    """After the modal average moved, scales matched and solo flows back onto the new split."""
    F = np.array([col.flows.sum() for col in columns]) if columns else np.zeros(0)
    served_rd = A_rd @ F if len(F) else np.zeros(len(q))
    served_rp = np.zeros(len(q))
    for n in range(len(F)):
        for wp, c in mult[n].items():
            served_rp[wp] += c * F[n]
    for n, col in enumerate(columns):
        ratio = 1.0
        w = driver[n]
        if served_rd[w] > q[w, RD] + EPS:
            ratio = min(ratio, q[w, RD] / served_rd[w])
        for wp in mult[n]:
            if served_rp[wp] > q[wp, RP] + EPS:
                ratio = min(ratio, q[wp, RP] / served_rp[wp])
        col.flows *= ratio
    F = np.array([col.flows.sum() for col in columns]) if columns else np.zeros(0)
    matched_rd = A_rd @ F if len(F) else np.zeros(len(q))
    matched_rp = np.zeros(len(q))
    for n in range(len(F)):
        for wp, c in mult[n].items():
            matched_rp[wp] += c * F[n]
    for w in range(len(q)):
        for flows, volume in ((da_flows[w], q[w, DA] + q[w, RD] - matched_rd[w]),
                              (pt_flows[w], q[w, PT] + q[w, RP] - matched_rp[w])):
            current = flows.sum()
            if current > EPS:
                flows *= max(volume, 0.0) / current
            elif volume > EPS:
                flows[0] = volume
