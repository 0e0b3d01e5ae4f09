from typing import List

import numpy as np
from scipy import sparse

from src.assign import INVARIANT_TOL
from src.assign.forest import BushForest
from src.assign.loading import da_volumes, pt_volumes
from src.assign.models import FlowState
from src.assign.problem import Problem


def _incidence(problem: Problem) -> sparse.csr_matrix:
    arrays = problem.network.arrays
    E = problem.network.num_links
    rows = np.concatenate([arrays.tails, arrays.heads])
    cols = np.concatenate([np.arange(E), np.arange(E)])
    vals = np.concatenate([np.ones(E), -np.ones(E)])
    return sparse.csr_matrix((vals, (rows, cols)), shape=(problem.network.num_nodes, E))


def check_invariants(problem: Problem, forest: BushForest, state: FlowState) -> List[str]:
    """
    Demand conservation, node balance of every commodity, the sequence-flow coupling,
    non-negativity and bush acyclicity. Returns the violated ones, empty when all hold.
    """
    out = []
    total = max(problem.total_demand, 1.0)
    tol = INVARIANT_TOL * total
    if np.any(np.abs(state.q.sum(axis=1) - problem.total) > tol):
        out.append("modal demand does not add up to od demand")
    for name, arr in (("q", state.q), ("Z", state.Z), ("F", state.F), ("level flows", state.level_flows),
                      ("DA flows", state.da_flows), ("PT flows", state.pt_flows)):
        if arr.size and arr.min() < -tol:
            out.append(f"negative {name}: {arr.min():.3g}")

    node = problem.network.node_index
    A = _incidence(problem)

    def balance(flows: np.ndarray, o: int, d: int, volume: float, what: str):
        b = A @ flows
        b[node[o]] -= volume
        b[node[d]] += volume
        worst = float(np.abs(b).max()) if b.size else 0.0
        if worst > tol:
            out.append(f"{what} off balance by {worst:.3g}")

    for n, levels in enumerate(problem.seq_levels):
        for lod in levels:
            if lod.virtual:
                continue
            # one row per level read by the driver and every passenger: coupling holds iff it carries F_n
            balance(state.level_flows[problem.level_row(n, lod.level)], lod.origin, lod.destination, state.F[n],
                    f"sequence {n} level {lod.level}")
    da = da_volumes(problem, state.q, state.F)
    pt = pt_volumes(problem, state.q, state.F)
    for w, (o, d) in enumerate(problem.ods):
        balance(state.da_flows[w], o, d, da[w], f"DA class of {(o, d)}")
        balance(state.pt_flows[w], o, d, pt[w], f"PT class of {(o, d)}")
    if problem.num_sequences:
        if np.any(problem.quit_rd(state.q, state.F) < -tol):
            out.append("more matched drivers than RD demand")
        if np.any(problem.rp_pool(state.q, state.F) < -tol):
            out.append("more matched passengers than RP demand")
    if not forest.all_acyclic():
        out.append("a bush lost its topological order")
    return out
