"""Small branch-and-bound solver for maximization ILPs with binary variables.

LP relaxations are delegated to scipy's HiGHS backend; the search itself is
best-bound with most-fractional branching and index tie-breaks, so results
are deterministic for a fixed input. Instances with many binaries are
handed to HiGHS's own MILP engine (same exactness, far better pruning);
the threshold is a parameter so test oracles can stay on the in-repo path.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

__all__ = ["MilpResult", "solve_max_ilp"]

INT_TOL = 1e-6
PRUNE_EPS = 1e-9
HIGHS_THRESHOLD = 32


@dataclass
class MilpResult:
    value: float
    x: np.ndarray
    status: str        # "optimal" | "infeasible" | "node_limit"
    nodes: int


def _solve_lp(c, A_ub, b_ub, bounds):
    res = linprog(-c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return None, None
    return -res.fun, res.x


def _pin_and_value(c, A_ub, b_ub, bounds, binary_mask, x_raw):
    """Fix binaries to their rounded values and re-solve the continuous rest.

    Keeps incumbent values exact instead of polluted by integrality slack.
    Returns (value, x) or (None, None) when the pinned problem is infeasible.
    """
    pinned = [tuple(b) for b in bounds]
    rounded = np.round(x_raw[binary_mask])
    for j, v in zip(np.flatnonzero(binary_mask), rounded):
        pinned[j] = (v, v)
    val, x = _solve_lp(c, A_ub, b_ub, pinned)
    if val is None:
        return None, None
    x = x.copy()
    x[binary_mask] = np.round(x[binary_mask])
    return val, x


def _solve_highs_milp(c, A_ub, b_ub, bounds, binary_mask):
    constraints = []
    if A_ub is not None:
        constraints.append(LinearConstraint(A_ub, -np.inf, b_ub))
    lb = np.array([b[0] for b in bounds])
    ub = np.array([b[1] for b in bounds])
    res = milp(c=-c, constraints=constraints,
               integrality=binary_mask.astype(int), bounds=Bounds(lb, ub))
    if res.x is None:
        return MilpResult(value=-np.inf, x=np.zeros(c.size), status="infeasible", nodes=0)
    val, x = _pin_and_value(c, A_ub, b_ub, bounds, binary_mask, res.x)
    if val is None:
        return MilpResult(value=-np.inf, x=np.zeros(c.size), status="infeasible", nodes=0)
    return MilpResult(value=val, x=x, status="optimal", nodes=int(getattr(res, "mip_node_count", 0)))


def solve_max_ilp(
    c: np.ndarray,
    A_ub: np.ndarray | None,
    b_ub: np.ndarray | None,
    bounds: list[tuple[float, float]],
    binary_mask: np.ndarray,
    incumbent: np.ndarray | None = None,
    node_limit: int | None = None,
    repair=None,
    highs_threshold: int = HIGHS_THRESHOLD,
) -> MilpResult:
    """Maximize c @ v subject to A_ub @ v <= b_ub and the given bounds.

    Variables flagged in binary_mask are forced to {0, 1}; the rest stay
    continuous. An optional feasible incumbent seeds the pruning bound.
    repair, when given, maps a (fractional) node solution to a feasible
    point or None; it is the caller's contract that returned points satisfy
    all constraints. Good repairs make the best-bound search prune early.
    """
    c = np.asarray(c, dtype=float)
    binary_mask = np.asarray(binary_mask, dtype=bool)
    n = c.size
    if int(binary_mask.sum()) > highs_threshold:
        return _solve_highs_milp(c, A_ub, b_ub, bounds, binary_mask)
    base_bounds = [tuple(b) for b in bounds]

    best_val = -np.inf
    best_x = None
    if incumbent is not None:
        best_val = float(c @ incumbent)
        best_x = np.asarray(incumbent, dtype=float).copy()

    def try_repair(x_lp):
        nonlocal best_val, best_x
        if repair is None:
            return
        cand = repair(x_lp)
        if cand is None:
            return
        val = float(c @ cand)
        if val > best_val:
            best_val = val
            best_x = np.asarray(cand, dtype=float).copy()

    root_val, root_x = _solve_lp(c, A_ub, b_ub, base_bounds)
    if root_val is None:
        return MilpResult(value=-np.inf, x=np.zeros(n), status="infeasible", nodes=1)
    try_repair(root_x)

    nodes = 0
    counter = 0
    # heap entries: (-bound, counter, bounds); best bound first
    heap = [(-root_val, counter, base_bounds, root_val, root_x)]
    while heap:
        neg_bound, _, nb_bounds, lp_val, lp_x = heapq.heappop(heap)
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            return MilpResult(
                value=best_val,
                x=best_x if best_x is not None else np.zeros(n),
                status="node_limit",
                nodes=nodes,
            )
        if -neg_bound <= best_val + PRUNE_EPS:
            continue

        frac = np.where(binary_mask, np.abs(lp_x - np.round(lp_x)), 0.0)
        if frac.max(initial=0.0) <= INT_TOL:
            val, x = _pin_and_value(c, A_ub, b_ub, nb_bounds, binary_mask, lp_x)
            if val is not None and val > best_val:
                best_val = val
                best_x = x
            continue

        # branch on the most fractional binary, lowest index on ties
        scores = np.where(binary_mask, 0.5 - np.abs(frac - 0.5), -1.0)
        j = int(np.argmax(scores))
        for fixed in (0.0, 1.0):
            child = list(nb_bounds)
            child[j] = (fixed, fixed)
            val, x = _solve_lp(c, A_ub, b_ub, child)
            if val is None:
                continue
            try_repair(x)
            if val <= best_val + PRUNE_EPS:
                continue
            counter += 1
            heapq.heappush(heap, (-val, counter, child, val, x))

    if best_x is None:
        return MilpResult(value=-np.inf, x=np.zeros(n), status="infeasible", nodes=nodes)
    return MilpResult(value=best_val, x=best_x, status="optimal", nodes=nodes)
