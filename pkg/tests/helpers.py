"""Shared generators for randomized test sweeps."""

import numpy as np

from tpa.topo import EstimationPattern, Topology, default_estimation_pattern


def random_topology(rng, K=None, M=None, density=0.45, ensure_connected=True):
    """Random bipartite topology with uniform weights on its edges."""
    K = K if K is not None else int(rng.integers(2, 9))
    M = M if M is not None else int(rng.integers(2, 13))
    adj = rng.random((K, M)) < density
    if ensure_connected:
        for k in range(K):
            if not adj[k].any():
                adj[k, int(rng.integers(M))] = True
    if not adj.any():
        adj[0, 0] = True
    weights = np.where(adj, rng.uniform(0.05, 1.0, (K, M)), 0.0)
    return Topology(adj=adj, weights=weights)


def random_topology_with_pattern(rng, sub_fraction=None, **kwargs):
    """Topology plus an estimation pattern, optionally a strict sub-pattern."""
    topo = random_topology(rng, **kwargs)
    if sub_fraction is None:
        return topo, default_estimation_pattern(topo)
    edges = topo.edges()
    keep = [e for e in edges if rng.random() < sub_fraction]
    if not keep:
        keep = [edges[0]]
    return topo, EstimationPattern.from_edges(topo, keep)
