from typing import Dict, Optional

import numpy as np

from src.assign import FLOW_TOL, logger
from src.assign.models import ALParams, FlowState, GroupEvaluation

RHO_MIN = 1e-4
RHO_MAX = 10.0


def seed_multipliers(state: FlowState, evaluations: Dict[int, GroupEvaluation], driver_of: np.ndarray) -> np.ndarray:
    """
    Multipliers that make a sequence over its quota exactly as costly as quitting: one
    independent solve per violating sequence.
    """
    mu = np.zeros(len(state.F))
    over = np.flatnonzero(state.F - state.Z > FLOW_TOL)
    for n in over:
        evaluation = evaluations.get(int(driver_of[n]))
        if evaluation is None:
            continue
        quit_cost = evaluation.options[-1].min_cost
        for o in evaluation.options:
            if o.sequence_id == n:
                mu[n] = max(0.0, quit_cost - (o.min_cost - o.al_term))
    return mu


def update_al(state: FlowState, al: ALParams, g: float = 0.0,
              evaluations: Optional[Dict[int, GroupEvaluation]] = None,
              driver_of: Optional[np.ndarray] = None) -> ALParams:
    """
    Multiplier and penalty update after an inner loop. The first call re-seeds both from the
    current costs when `evaluations` are given; later calls apply the standard update.
    """
    h = state.F - state.Z
    positive = np.maximum(h, 0.0)
    norm = float(np.linalg.norm(positive))
    if al.outer_iteration == 0 and evaluations is not None:
        mu = seed_multipliers(state, evaluations, driver_of)
        violation = float(positive.sum())
        if violation > FLOW_TOL:
            rho = float(np.clip(g / violation, RHO_MIN, RHO_MAX))
        else:
            rho = max(al.rho, al.rho_floor)
    else:
        mu = np.maximum(0.0, al.mu_tilde + al.rho * h)
        rho = al.rho
        if al.last_violation_norm is not None and norm > al.sigma2 * al.last_violation_norm:
            rho *= al.sigma1
    logger.debug(f"AL update: rho {al.rho:.4g} -> {rho:.4g}, |h+| {norm:.4g}, max mu {mu.max() if len(mu) else 0:.4g}")
    return al.copy(update={
        "mu_tilde": mu,
        "rho": rho,
        "last_violation_norm": norm,
        "outer_iteration": al.outer_iteration + 1,
    })
