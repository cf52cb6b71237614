"""Reference pilot assignment schemes used for comparison runs."""

from __future__ import annotations

import numpy as np

from .lrmc import CompletionProblem, complete
from .netgen import NetworkRealization
from .topo import EstimationPattern, PilotAssignment, Topology

__all__ = [
    "semi_random_assign",
    "cellfree_greedy_assign",
    "lrmc_plus_semirandom",
]


def semi_random_assign(K: int, T: int, seed: int) -> PilotAssignment:
    """Partition the K users uniformly at random into T near-equal pilot groups."""
    if not (1 <= T <= K):
        raise ValueError("need 1 <= T <= K")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(K)
    X = np.zeros((K, T))
    groups = np.array_split(perm, T)
    for t, group in enumerate(groups):
        X[group, t] = 1.0
    return PilotAssignment(T=T, X=X, scheme="semi-random", seed=seed)


def _contamination(k: int, t: int, pilot: np.ndarray, topo: Topology) -> float:
    """Fading power other same-pilot users leak into UE k's neighborhood."""
    total = 0.0
    for m in topo.rrhs_of_ue(k):
        for kk in topo.ues_of_rrh(m):
            if kk != k and pilot[kk] == t:
                total += topo.weights[kk, m]
    return total


def cellfree_greedy_assign(
    net: NetworkRealization,
    topo: Topology,
    T: int,
    n_iters: int = 10,
    seed: int = 0,
) -> PilotAssignment:
    """Random start, then iteratively re-pilot the most contaminated user.

    The refinement metric is the same-pilot fading power received over the
    user's connected RRHs, a rate-free proxy for pilot contamination; each
    step moves the worst user to its argmin pilot, so its metric never
    increases.
    """
    if T < 1 or n_iters < 0:
        raise ValueError("need T >= 1 and n_iters >= 0")
    start = semi_random_assign(net.K, T, seed)
    pilot = np.argmax(start.X > 0, axis=1)
    for _ in range(n_iters):
        scores = np.array([_contamination(k, pilot[k], pilot, topo) for k in range(net.K)])
        worst = int(np.argmax(scores))
        if scores[worst] == 0:
            break
        options = np.array([_contamination(worst, t, pilot, topo) for t in range(T)])
        pilot[worst] = int(np.argmin(options))
    X = np.zeros((net.K, T))
    X[np.arange(net.K), pilot] = 1.0
    return PilotAssignment(T=T, X=X, scheme="cellfree-greedy", seed=seed)


def lrmc_plus_semirandom(
    topo: Topology,
    pat: EstimationPattern,
    seed: int = 0,
    **complete_kwargs,
) -> PilotAssignment:
    """Take the pilot dimension from matrix completion, then assign semi-randomly."""
    prob = CompletionProblem.from_pattern(topo, pat)
    result = complete(prob, **complete_kwargs)
    T = result.T if result.converged else topo.K
    T = min(T, topo.K)
    out = semi_random_assign(topo.K, T, seed)
    out.scheme = "lrmc-semirandom"
    return out
