from typing import Sequence, Tuple

import numpy as np

from src.assign import FLOW_TOL


def cheapest_mode(costs: np.ndarray, active: Sequence[int]) -> int:
    """Lowest-cost active mode; ties go to the lowest mode index."""
    return min(active, key=lambda m: (costs[m], m))


def update_mode_split(q: np.ndarray, costs: np.ndarray, theta1: float, active: Sequence[int],
                      total: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Closed-form proximal mode shift: every active mode m gives min(q^m, theta1*(C^m - C^m_min))
    to the cheapest mode. Returns the new split and the norm of the change.
    """
    new_q = q.copy()
    for w in range(q.shape[0]):
        if total[w] <= FLOW_TOL:
            continue
        best = cheapest_mode(costs[w], active)
        for m in active:
            if m == best:
                continue
            delta = min(new_q[w, m], theta1 * max(costs[w, m] - costs[w, best], 0.0))
            new_q[w, m] -= delta
        new_q[w, best] = total[w] - sum(new_q[w, m] for m in active if m != best)
    return new_q, float(np.linalg.norm(new_q - q))
