"""Small hand-built instances used by tests, docs, and the CLI verify demo."""

from __future__ import annotations

import numpy as np

from .topo import EstimationPattern, PilotAssignment, Topology

__all__ = ["demo_topology", "demo_assignment"]

# 4 UEs x 8 RRHs. Estimation edges admit a two-pilot schedule; the three
# extra topology-only edges act as significant interference that any valid
# schedule must keep separable. This is an approximate reconstruction of a
# known-good instance; edge choices on ambiguous links were resolved so a
# proper two-coloring of the conflict graph exists.
_ESTIMATION_EDGES = [
    (0, 0), (0, 1),
    (1, 1), (1, 2), (1, 4),
    (2, 2), (2, 4),
    (3, 3), (3, 5), (3, 6), (3, 7),
]
_INTERFERENCE_EDGES = [(0, 3), (1, 0), (2, 3)]


def demo_topology() -> tuple[Topology, EstimationPattern]:
    """The 4x8 demo instance as (topology, estimation pattern)."""
    K, M = 4, 8
    adj = np.zeros((K, M), dtype=bool)
    weights = np.zeros((K, M))
    for i, (k, m) in enumerate(_ESTIMATION_EDGES + _INTERFERENCE_EDGES):
        adj[k, m] = True
        weights[k, m] = 1.0 + 0.01 * i   # distinct positive weights
    topo = Topology(adj=adj, weights=weights)
    pat = EstimationPattern.from_edges(topo, _ESTIMATION_EDGES)
    return topo, pat


def demo_assignment() -> PilotAssignment:
    """A feasible two-pilot assignment for the demo instance.

    UE 0 and UE 2 share pilot 1, UE 1 uses pilot 2, and UE 3 transmits the
    sum of both pilots; every RRH can still separate its desired channels.
    """
    X = np.array([
        [1.0, 0.0],
        [0.0, 1.0],
        [1.0, 0.0],
        [1.0, 1.0],
    ])
    _, pat = demo_topology()
    serving = [set(pat.ues_of_rrh(m)) for m in range(pat.M)]
    return PilotAssignment(T=2, X=X, serving=serving, scheme="demo", seed=None)
