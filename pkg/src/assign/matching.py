"""
Platform side: a proximal gradient ascent step on the VKT-saving objective, projected back
onto the quotas the RD and RP demand can fill.
"""
from typing import Tuple

import cvxpy as cp
import numpy as np

from src.assign import FLOW_TOL, logger
from src.assign.problem import RD, RP, Problem


class PlatformProjector:
    """
    Euclidean projection onto {Z >= 0, A_rd Z <= q_rd, A_rp Z <= q_rp}. The program is
    built once per problem with the target point and the demands as parameters.
    """

    def __init__(self, problem: Problem):
        self.problem = problem
        S, W = problem.num_sequences, problem.num_ods
        self.program = None
        if S == 0:
            return
        self.z = cp.Variable(S, nonneg=True)
        self.target = cp.Parameter(S)
        self.rd_cap = cp.Parameter(W, nonneg=True)
        self.rp_cap = cp.Parameter(W, nonneg=True)
        constraints = [problem.A_rd @ self.z <= self.rd_cap, problem.A_rp @ self.z <= self.rp_cap]
        self.program = cp.Problem(cp.Minimize(cp.sum_squares(self.z - self.target)), constraints)
        solvers = cp.installed_solvers()
        self.solver = cp.CLARABEL if cp.CLARABEL in solvers else cp.OSQP

    def feasible(self, Z: np.ndarray, q: np.ndarray) -> bool:
        p = self.problem
        return bool(np.all(Z >= 0) and np.all(p.A_rd @ Z <= q[:, RD] + FLOW_TOL)
                    and np.all(p.A_rp @ Z <= q[:, RP] + FLOW_TOL))

    def project(self, Y: np.ndarray, q: np.ndarray) -> np.ndarray:
        if self.program is None or self.feasible(Y, q):
            return Y.copy()
        self.target.value = Y
        self.rd_cap.value = np.maximum(q[:, RD], 0.0)
        self.rp_cap.value = np.maximum(q[:, RP], 0.0)
        if self.solver == cp.OSQP:
            self.program.solve(solver=self.solver, eps_abs=1e-9, eps_rel=1e-9, max_iter=200000)
        else:
            self.program.solve(solver=self.solver)
        if self.z.value is None:
            logger.warning(f"Platform projection ended with status {self.program.status}; keeping a scaled-down point")
            return self.repair(np.maximum(Y, 0.0), q)
        return self.repair(np.maximum(np.asarray(self.z.value, dtype=float), 0.0), q)

    def repair(self, Z: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Scales sequences down until solver round-off no longer breaks a demand bound."""
        p = self.problem
        Z = Z.copy()
        for A, cap in ((p.A_rd, q[:, RD]), (p.A_rp, q[:, RP])):
            used = A @ Z
            over = np.flatnonzero(used > np.maximum(cap, 0.0))
            for w in over:
                ratio = max(cap[w], 0.0) / used[w]
                row = A.getrow(w)
                Z[row.indices] *= ratio
        return Z


def update_matching(projector: PlatformProjector, Z: np.ndarray, R: np.ndarray, q: np.ndarray,
                    theta2: float) -> Tuple[np.ndarray, float]:
    """Z <- proj(Z + theta2 * R); returns the new quotas and the change norm."""
    if not np.all(np.isfinite(R)):
        raise ValueError("matching objective must be finite")
    new_Z = projector.project(Z + theta2 * R, q)
    return new_Z, float(np.linalg.norm(new_Z - Z))
