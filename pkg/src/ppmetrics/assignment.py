"""Exact solvers for the square assignment problem and the discrete
transportation problem.

Both solvers are deterministic and exact (up to floating-point summation):
``solve_assignment`` wraps the O(n^3) shortest-augmenting-path solver from
scipy, ``solve_transportation`` solves the Kantorovich primal with the
HiGHS dual simplex and then re-fits the optimal basis so the marginal
constraints hold to machine precision.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog
from scipy.sparse import coo_matrix

__all__ = [
    "AssignmentResult",
    "TransportPlan",
    "solve_assignment",
    "solve_transportation",
    "MAX_TRANSPORT_SIDE",
]

# dense transportation instances beyond this side length are rejected
MAX_TRANSPORT_SIDE = 500


@dataclass(frozen=True)
class AssignmentResult:
    """Optimal bijection rows -> columns and its total cost.

    ``permutation[i]`` is the column assigned to row ``i`` (0-based).
    """

    permutation: np.ndarray
    total_cost: float


@dataclass(frozen=True)
class TransportPlan:
    """Nonnegative coupling matrix with prescribed marginals and its cost."""

    plan: np.ndarray
    total_cost: float


def _validate_costs(cost, square=False):
    arr = np.asarray(cost, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"cost must be a 2-d matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError("cost matrix contains NaN")
    if not np.isfinite(arr).all():
        raise ValueError("cost matrix contains non-finite entries")
    if (arr < 0).any():
        raise ValueError("cost matrix contains negative entries")
    return arr


def solve_assignment(cost):
    """Minimum-cost perfect matching of a square nonnegative cost matrix.

    Returns the optimal permutation and the exact total cost (compensated
    summation of the selected entries). Ties between optimal permutations
    are broken deterministically by the solver's scanning order and never
    affect the total cost.
    """
    arr = _validate_costs(cost, square=True)
    rows, cols = linear_sum_assignment(arr)
    perm = np.empty(arr.shape[0], dtype=np.intp)
    perm[rows] = cols
    total = math.fsum(arr[rows, cols].tolist())
    return AssignmentResult(permutation=perm, total_cost=total)


def _refit_basis(plan, source, target, tol=1e-9):
    """Re-derive the flow values on the support of an optimal basic plan.

    A basic solution is supported on a forest of cells, so the flows can be
    peeled off leaf rows/columns by plain subtraction of marginals. This
    removes the LP solver's feasibility slack from the returned plan
    without moving to a different vertex. Falls back to the solver's plan
    if the support is not forest-structured.
    """
    active = plan > tol
    if active.sum() > sum(plan.shape) - 1:
        return plan
    refit = np.zeros_like(plan)
    row_rem = np.asarray(source, dtype=float).copy()
    col_rem = np.asarray(target, dtype=float).copy()
    row_deg = active.sum(axis=1)
    col_deg = active.sum(axis=0)
    remaining = int(active.sum())
    while remaining:
        rows = np.nonzero(row_deg == 1)[0]
        if rows.size:
            i = int(rows[0])
            j = int(np.nonzero(active[i])[0][0])
            flow = row_rem[i]
        else:
            cols = np.nonzero(col_deg == 1)[0]
            if not cols.size:
                return plan  # cycle in support: not a basic solution
            j = int(cols[0])
            i = int(np.nonzero(active[:, j])[0][0])
            flow = col_rem[j]
        flow = max(flow, 0.0)
        refit[i, j] = flow
        row_rem[i] -= flow
        col_rem[j] -= flow
        active[i, j] = False
        row_deg[i] -= 1
        col_deg[j] -= 1
        remaining -= 1
    return refit


def solve_transportation(source_weights, target_weights, cost):
    """Optimal transport plan between two discrete probability vectors.

    Minimizes ``sum(plan * cost)`` subject to ``plan @ 1 = source_weights``
    and ``plan.T @ 1 = target_weights``; both weight vectors must sum to 1
    within 1e-10. Instances with a side longer than ``MAX_TRANSPORT_SIDE``
    are rejected.
    """
    src = np.asarray(source_weights, dtype=float)
    tgt = np.asarray(target_weights, dtype=float)
    arr = _validate_costs(cost)
    if src.ndim != 1 or tgt.ndim != 1:
        raise ValueError("weights must be 1-d vectors")
    if arr.shape != (src.size, tgt.size):
        raise ValueError(
            f"cost shape {arr.shape} does not match weights ({src.size}, {tgt.size})"
        )
    for name, w in (("source", src), ("target", tgt)):
        if (w < 0).any():
            raise ValueError(f"{name} weights contain negative entries")
        if abs(math.fsum(w.tolist()) - 1.0) > 1e-10:
            raise ValueError(f"{name} weights must sum to 1 within 1e-10")
    k, l = arr.shape
    if max(k, l) > MAX_TRANSPORT_SIDE:
        raise ValueError(
            f"transportation instance {k}x{l} exceeds the supported size "
            f"{MAX_TRANSPORT_SIDE}; split the problem or use the assignment path"
        )

    # equality constraints: k row sums then l column sums (one is redundant,
    # HiGHS handles the dependency)
    row_idx = np.repeat(np.arange(k), l)
    col_idx = np.tile(np.arange(l), k) + k
    var_idx = np.arange(k * l)
    a_eq = coo_matrix(
        (np.ones(2 * k * l),
         (np.concatenate([row_idx, col_idx]), np.concatenate([var_idx, var_idx]))),
        shape=(k + l, k * l),
    )
    b_eq = np.concatenate([src, tgt])
    res = linprog(
        arr.ravel(),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs-ds",
        options={
            "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10,
        },
    )
    if not res.success:
        raise RuntimeError(f"transportation solve failed: {res.message}")
    plan = np.maximum(res.x.reshape(k, l), 0.0)
    plan = _refit_basis(plan, src, tgt)
    total = math.fsum((plan * arr).ravel().tolist())
    return TransportPlan(plan=plan, total_cost=total)
