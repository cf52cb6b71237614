"""Low-complexity pilot assignment by greedy many-to-many matching.

Each round pre-selects a working topology (dominant-RRH competition pruning,
then per-UE strongest-kappa_u pruning), then resolves per-RRH cap violations
by comparing a profit/cost evaluation of switching the RRH off against
keeping only its strongest kappa UEs. Everything is driven by the path-loss
weights alone; no rate evaluation happens inside the loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .smwim import SequentialResult, RoundSolution, matched_weight
from .topo import Topology

__all__ = [
    "GreedyConfig",
    "RoundState",
    "argmax_mask",
    "profit_cost",
    "evaluate_phi",
    "greedy_round",
    "greedy_assign",
]


@dataclass(frozen=True)
class GreedyConfig:
    T_max: int
    kappa: int          # max UEs an RRH estimates per pilot
    kappa_u: int        # max RRHs serving one UE per pilot
    delta: float = 1.0  # profit/cost trade-off

    def __post_init__(self):
        if self.T_max < 1 or self.kappa < 1 or self.kappa_u < 1:
            raise ValueError("T_max, kappa, kappa_u must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


@dataclass
class RoundState:
    """Working copies of one round's adjacency/weights and selection flags."""

    T_tilde: np.ndarray   # (K, M) bool
    B_tilde: np.ndarray   # (K, M), supported on T_tilde
    x: np.ndarray         # (K,) int
    y: np.ndarray         # (M,) int
    profit: np.ndarray | None = None
    cost: np.ndarray | None = None

    @classmethod
    def fresh(cls, T_cur: np.ndarray, B_cur: np.ndarray) -> "RoundState":
        K, M = T_cur.shape
        return cls(
            T_tilde=T_cur.astype(bool).copy(),
            B_tilde=B_cur.copy(),
            x=np.ones(K, dtype=int),
            y=np.ones(M, dtype=int),
        )

    def refresh_weights(self):
        self.B_tilde = self.B_tilde * self.T_tilde
        self.profit, self.cost = profit_cost(self.B_tilde)


def argmax_mask(B_tilde: np.ndarray) -> np.ndarray:
    """Row-maximum indicator: one mark per non-zero row, lowest column on ties."""
    B = np.asarray(B_tilde, dtype=float)
    if np.any(B < 0):
        raise ValueError("weights must be non-negative")
    mask = np.zeros(B.shape, dtype=bool)
    row_max = B.max(axis=1)
    nonzero = row_max > 0
    cols = np.argmax(B, axis=1)  # first maximum, i.e. lowest column index
    mask[np.flatnonzero(nonzero), cols[nonzero]] = True
    return mask


def profit_cost(B_tilde: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Profit P[k,m] = B[k,m] * column_sum[m]; cost drops the self term.

    P - C equals B squared elementwise, which is the quantity a lone
    uncontested link contributes.
    """
    B = np.asarray(B_tilde, dtype=float)
    col_sum = B.sum(axis=0)
    P = B * col_sum[None, :]
    C = P - B * B
    return P, C


def evaluate_phi(x, y, P, C, delta: float) -> float:
    """Round evaluation: sum over active (k, m) of P - delta * C."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(x @ (P - delta * C) @ y)


def _top_indices(values: np.ndarray, candidates: np.ndarray, n: int) -> np.ndarray:
    """Indices of the n largest values among candidates, lowest index on ties."""
    order = sorted(candidates.tolist(), key=lambda i: (-values[i], i))
    return np.array(order[:n], dtype=int)


def greedy_round(state: RoundState, cfg: GreedyConfig):
    """Run one round's pre-selection and cap resolution on the given state.

    Returns (x, y, z): final selection flags and the selected edge matrix.
    Flags are post-filtered so x[k] = 1 means UE k actually acquired at
    least one edge this round.
    """
    K, M = state.T_tilde.shape

    # stage 1: competing UEs whose strongest RRH coincides; only the
    # strongest competitor keeps its row this round
    mask = argmax_mask(state.B_tilde)
    for m in np.flatnonzero(mask.sum(axis=0) > 1):
        competitors = np.flatnonzero(mask[:, m])
        weights = state.B_tilde[competitors, m]
        if weights.max() <= 0:
            continue  # all competitors already pruned by an earlier column
        winner = competitors[int(np.argmax(weights))]
        losers = competitors[competitors != winner]
        state.T_tilde[losers, :] = False
        state.B_tilde = state.B_tilde * state.T_tilde

    # stage 2: per-UE cap on active RRHs
    row_deg = (state.T_tilde & (state.y[None, :] > 0)).sum(axis=1)
    for k in np.flatnonzero(row_deg > cfg.kappa_u):
        support = np.flatnonzero(state.T_tilde[k, :])
        keep = _top_indices(state.B_tilde[k, :], support, cfg.kappa_u)
        drop = np.setdiff1d(support, keep)
        state.T_tilde[k, drop] = False
    state.refresh_weights()

    # stage 3: resolve per-RRH cap violations
    while True:
        load = (state.T_tilde & (state.x[:, None] > 0)).sum(axis=0)
        load = np.where(state.y > 0, load, 0)
        violators = np.flatnonzero(load > cfg.kappa)
        if violators.size == 0:
            break
        m = int(violators[0])
        phi_b_y = state.y.copy()
        phi_b_y[m] = 0
        phi_b = evaluate_phi(state.x, phi_b_y, state.profit, state.cost, cfg.delta)

        active = np.flatnonzero((state.x > 0) & state.T_tilde[:, m])
        keep = _top_indices(state.B_tilde[:, m], active, cfg.kappa)
        drop = np.setdiff1d(active, keep)
        phi_u_x = state.x.copy()
        phi_u_x[drop] = 0
        phi_u = evaluate_phi(phi_u_x, state.y, state.profit, state.cost, cfg.delta)

        if phi_b > phi_u:
            state.y[m] = 0
            state.T_tilde[:, m] = False
        else:
            state.x[drop] = 0
            state.T_tilde[drop, :] = False
        state.refresh_weights()

    z = state.T_tilde & (state.x[:, None] > 0) & (state.y[None, :] > 0)
    x_fin = z.any(axis=1).astype(int)
    y_fin = z.any(axis=0).astype(int)
    return x_fin, y_fin, z


def greedy_assign(topo: Topology, cfg: GreedyConfig) -> SequentialResult:
    """Iterate greedy rounds over pilot dimensions.

    A UE selected in some round is removed from all later rounds, so each
    UE transmits at most one pilot; UEs never selected within T_max stay
    with an all-zero pilot row and are reported as unassigned.
    """
    if cfg.kappa_u > topo.M:
        raise ValueError("kappa_u cannot exceed the number of RRHs")
    T_cur = topo.adj.copy()
    B_cur = topo.weights.copy()
    rounds: list[RoundSolution] = []
    estimated: list[tuple[int, int, int]] = []
    while len(rounds) < cfg.T_max and T_cur.any():
        state = RoundState.fresh(T_cur, B_cur)
        state.refresh_weights()
        x, y, z = greedy_round(state, cfg)
        if not z.any():
            break
        t = len(rounds)
        weight = matched_weight(topo.weights, z.astype(float))
        rounds.append(RoundSolution(
            x=x, y=y, z=z.astype(float), objective=weight,
            master_objective=float(y.sum()) + weight,
            cuts_used=0, converged=True,
        ))
        for k, m in zip(*np.nonzero(z)):
            estimated.append((int(k), int(m), t))
        T_cur = T_cur & ~(x.astype(bool)[:, None])  # assigned UEs leave entirely
        B_cur = B_cur * T_cur
    if not rounds:
        raise ValueError("greedy selected nothing (empty topology?)")
    X = np.stack([r.x for r in rounds], axis=1).astype(float)
    Y = np.stack([r.y for r in rounds], axis=1).astype(float)
    result = SequentialResult(
        T=len(rounds), rounds=rounds, X=X, Y=Y, estimated=estimated,
        scheme="greedy",
    )
    return result
