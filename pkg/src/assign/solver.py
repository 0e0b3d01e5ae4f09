"""
Outer augmented-Lagrangian loop around inner block-proximal passes: mode split, platform
matching, bush update and per-group sequence-bush pushing.
"""
import time
from typing import Optional

import numpy as np

from src.assign import COST_REFRESH_GROUP, FLOW_TOL, InvariantViolation, logger
from src.assign.forest import BushForest
from src.assign.gaps import compute_gaps
from src.assign.invariants import check_invariants
from src.assign.lagrangian import update_al
from src.assign.loading import initialize, rebalance
from src.assign.matching import PlatformProjector, update_matching
from src.assign.modalcosts import compute_modal_costs
from src.assign.models import EquilibriumConfig, EquilibriumSolution, FlowState, ALParams
from src.assign.modesplit import update_mode_split
from src.assign.options import evaluate_all, solo_costs
from src.assign.problem import Demands, Problem
from src.assign.pushing import push_all
from src.matchgen.models import SequencePool
from src.netio.models import Network


class Evaluation:
    """Everything read off one cost snapshot."""

    def __init__(self, problem: Problem, forest: BushForest, state: FlowState, al: ALParams):
        self.snapshot = problem.cost_model.evaluate(state.x_veh)
        # labels are read on updated bushes, so a zero gap means no cheaper link is left outside
        forest.build_all(self.snapshot)
        forest.update_all(self.snapshot, state)
        self.pending = forest.pending()
        self.groups = evaluate_all(problem, forest, self.snapshot, state, al)
        self.da, self.pt = solo_costs(problem, forest, self.snapshot, state)
        self.modal = compute_modal_costs(problem, self.snapshot, state, self.groups, self.da, self.pt)
        self.gaps = compute_gaps(problem, self.snapshot, state, self.modal, self.groups, self.da, self.pt, al)


def _zero_solution(problem: Problem, started: float) -> EquilibriumSolution:
    W, S, E = problem.num_ods, problem.num_sequences, problem.network.num_links
    state = FlowState(q=np.zeros((W, 4)), Z=np.zeros(S), F=np.zeros(S),
                      level_flows=np.zeros((problem.num_level_rows, E)), da_flows=np.zeros((W, E)),
                      pt_flows=np.zeros((W, E)), x_veh=np.zeros(E))
    logger.info("No demand: returning the empty solution")
    return EquilibriumSolution(state=state, al=ALParams(mu_tilde=np.zeros(S)), converged=True,
                               wall_time=time.time() - started, problem=problem)


def inner_pass(problem: Problem, forest: BushForest, projector: PlatformProjector, state: FlowState, al: ALParams,
               current: Evaluation) -> ALParams:
    """One pass of the inner loop; mutates `state` and returns the advanced step regulators."""
    snapshot = current.snapshot

    if problem.mode_choice:
        old_q = state.q.copy()
        state.q, norm = update_mode_split(state.q, current.modal.cost, al.theta1, problem.active_modes, problem.total)
        al = al.copy(update={"mode_step": al.mode_step.update(norm)})
        rebalance(problem, forest, snapshot, state, old_q)

    if problem.num_sequences:
        state.Z, norm = update_matching(projector, state.Z, problem.R, state.q, al.theta2)
        al = al.copy(update={"matching_step": al.matching_step.update(norm)})

    refresh = None
    if problem.config.cost_refresh == COST_REFRESH_GROUP:
        def refresh(s: FlowState):
            return problem.cost_model.evaluate(s.x_veh)
    moved = push_all(problem, forest, snapshot, state, al, refresh)
    state.recompute_vehicular()
    al = al.copy(update={"flow_step": al.flow_step.update(moved["groups"] + moved["solo"])})
    logger.debug(f"pushed {moved['groups']:.2f} between options, {moved['solo']:.2f} on solo routes")
    return al


def _warm_state(forest: BushForest, cold: FlowState, warm: EquilibriumSolution) -> Optional[FlowState]:
    """The flows and bushes of an earlier solution of the same instance, or None when the layouts differ."""
    state = warm.state
    shapes = (state.q.shape, state.F.shape, state.level_flows.shape, state.da_flows.shape)
    if warm.forest is None or shapes != (cold.q.shape, cold.F.shape, cold.level_flows.shape, cold.da_flows.shape):
        logger.warning("Warm start ignored: the earlier solution belongs to a different instance")
        return None
    forest.adopt(warm.forest)
    state = state.clone()
    state.recompute_vehicular()
    return state


def solve(network: Network, demands: Demands, pool: Optional[SequencePool] = None,
          config: Optional[EquilibriumConfig] = None,
          warm_start: Optional[EquilibriumSolution] = None) -> EquilibriumSolution:
    """
    Inner block passes until G_M and G_N fall under tolerance with no improving link left
    outside the bushes, inside augmented-Lagrangian outer iterations. `warm_start` resumes
    from the flows and bushes of an earlier solution of the same network, demand and pool.
    """
    config = config or EquilibriumConfig()
    started = time.time()
    problem = Problem(network, demands, pool, config)
    if problem.total_demand <= FLOW_TOL:
        return _zero_solution(problem, started)

    forest = BushForest(problem)
    state, al = initialize(problem, forest, problem.cost_model.free_flow())
    warm_state = _warm_state(forest, state, warm_start) if warm_start is not None else None
    if warm_state is not None:
        state = warm_state
        logger.info("Warm start from an earlier solution")
    projector = PlatformProjector(problem)
    gaps, violations = [], []
    inner_total = 0
    converged = False
    current = None

    for outer in range(config.max_outer):
        inner_converged = False
        for p in range(config.max_inner):
            current = Evaluation(problem, forest, state, al)
            report = current.gaps.copy(update={"inner_iteration": inner_total})
            gaps.append(report)
            logger.debug(f"outer {outer} inner {p}: G_M {report.g_m:.3e} G_N {report.g_n:.3e} "
                         f"ratio {report.al_ratio:.3e} theta {report.theta:.3f}")
            if report.g_m <= config.epsilon_m and report.g_n <= config.epsilon_n and current.pending == 0:
                inner_converged = True
                break
            al = inner_pass(problem, forest, projector, state, al, current)
            inner_total += 1
            if config.check_invariants:
                found = check_invariants(problem, forest, state)
                if found:
                    violations.extend(f"inner {inner_total}: {v}" for v in found)
                    logger.warning(f"Invariant check failed after inner iteration {inner_total}: {found[0]}")
        if not inner_converged:
            current = Evaluation(problem, forest, state, al)
            logger.warning(f"Inner loop hit its cap of {config.max_inner} iterations in outer iteration {outer}")

        report = current.gaps
        total = problem.total_demand
        logger.info(f"Outer iteration {outer}: G_M {report.g_m:.3e}, G_N {report.g_n:.3e}, "
                    f"AL ratio {report.al_ratio:.3e}, quota excess {report.violation:.3g}")
        if inner_converged and report.al_ratio <= config.epsilon_3 and report.violation <= config.epsilon_3 * total:
            converged = True
            break
        al = update_al(state, al, report.g_n * total, current.groups, problem.seq_driver)

    if not converged:
        logger.warning(f"No equilibrium within {config.max_outer} outer iterations; returning the last iterate")
    solution = EquilibriumSolution(
        state=state,
        al=al,
        modal_costs=current.modal,
        evaluations=current.groups,
        gaps=gaps,
        converged=converged,
        warm_started=warm_state is not None,
        inner_iterations=inner_total,
        outer_iterations=al.outer_iteration + 1,
        invariant_violations=violations,
        wall_time=time.time() - started,
        problem=problem,
        forest=forest,
        snapshot=current.snapshot,
    )
    return solution


def raise_on_violations(solution: EquilibriumSolution):
    if solution.invariant_violations:
        raise InvariantViolation("; ".join(solution.invariant_violations[:5]))
