"""Sparsified UE-RRH topologies, conflict graphs, and combinatorial pilot assignments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .netgen import NetworkRealization

__all__ = [
    "Topology",
    "EstimationPattern",
    "ConflictGraph",
    "PilotAssignment",
    "sparsify_threshold",
    "sparsify_top_fraction",
    "default_estimation_pattern",
    "build_conflict_graph",
    "color_assignment",
    "coded_multicast_assignment",
    "verify_assignment",
]

RANK_TOL = 1e-9  # relative singular value cutoff for rank decisions


@dataclass
class Topology:
    """Bipartite UE-RRH connectivity with per-edge weights.

    adj[k, m] = 1 marks a kept link, weights holds the large-scale fading
    coefficient on kept links and 0 elsewhere.
    """

    adj: np.ndarray       # (K, M) bool
    weights: np.ndarray   # (K, M) float, supported on adj

    def __post_init__(self):
        self.adj = np.asarray(self.adj, dtype=bool)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.adj.shape != self.weights.shape:
            raise ValueError("adj and weights shapes differ")
        on = self.weights > 0
        if not np.array_equal(on, self.adj):
            raise ValueError("weights must be positive exactly on adjacency edges")
        self.adj.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def K(self) -> int:
        return self.adj.shape[0]

    @property
    def M(self) -> int:
        return self.adj.shape[1]

    @property
    def n_edges(self) -> int:
        return int(self.adj.sum())

    @property
    def isolated_ues(self) -> tuple[int, ...]:
        """UEs with no connected RRH at all."""
        return tuple(int(k) for k in np.flatnonzero(~self.adj.any(axis=1)))

    @property
    def has_isolated_ues(self) -> bool:
        return len(self.isolated_ues) > 0

    def ues_of_rrh(self, m: int) -> tuple[int, ...]:
        return tuple(int(k) for k in np.flatnonzero(self.adj[:, m]))

    def rrhs_of_ue(self, k: int) -> tuple[int, ...]:
        return tuple(int(m) for m in np.flatnonzero(self.adj[k, :]))

    def edges(self) -> list[tuple[int, int]]:
        ks, ms = np.nonzero(self.adj)
        return sorted(zip(ks.tolist(), ms.tolist()))


@dataclass
class EstimationPattern:
    """Sub-pattern of a topology listing the channels that must be estimated."""

    K: int
    M: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, topo: Topology, edges) -> "EstimationPattern":
        edges = frozenset((int(k), int(m)) for k, m in edges)
        for k, m in edges:
            if not (0 <= k < topo.K and 0 <= m < topo.M):
                raise ValueError(f"edge ({k},{m}) out of range")
            if not topo.adj[k, m]:
                raise ValueError(f"estimation edge ({k},{m}) not present in topology")
        return cls(K=topo.K, M=topo.M, edges=edges)

    def ues_of_rrh(self, m: int) -> tuple[int, ...]:
        return tuple(sorted(k for k, mm in self.edges if mm == m))

    def rrhs_of_ue(self, k: int) -> tuple[int, ...]:
        return tuple(sorted(m for kk, m in self.edges if kk == k))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def mask(self) -> np.ndarray:
        out = np.zeros((self.K, self.M), dtype=bool)
        for k, m in self.edges:
            out[k, m] = True
        return out


@dataclass
class ConflictGraph:
    """One vertex per estimation edge; adjacency marks pilot-sharing conflicts."""

    vertices: list[tuple[int, int]]            # sorted (ue, rrh) labels
    adjacency: list[set[int]]                  # index based
    K: int
    M: int
    isolated_ues: tuple[int, ...] = ()

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])


@dataclass
class PilotAssignment:
    """Pilot matrix plus the serving structure a scheme commits to.

    X has one row per UE; binary for combinatorial schemes, real for coded
    multicast. serving[m], when present, lists the UEs whose channels RRH m
    estimates and serves. Schemes that leave serving as None delegate the
    serving-set choice to the evaluator's policy.
    """

    T: int
    X: np.ndarray                            # (K, T)
    serving: list[set[int]] | None = None    # length M when present
    Y: np.ndarray | None = None              # (M, T) RRH activity
    scheme: str = ""
    seed: int | None = None
    isolated_ues: tuple[int, ...] = ()

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.T < 1:
            raise ValueError("pilot dimension must be >= 1")
        if self.X.ndim != 2 or self.X.shape[1] != self.T:
            raise ValueError("X must be K x T")
        if self.serving is not None:
            served = set().union(*self.serving) if self.serving else set()
            row_ok = (np.abs(self.X).sum(axis=1) > 0)
            for k in served:
                if not row_ok[k]:
                    raise ValueError(f"served UE {k} has an all-zero pilot row")

    @property
    def K(self) -> int:
        return self.X.shape[0]


def sparsify_threshold(net: NetworkRealization, delta_beta: float) -> Topology:
    """Keep exactly the links whose fading coefficient reaches delta_beta."""
    if delta_beta <= 0:
        raise ValueError("delta_beta must be strictly positive")
    adj = net.beta >= delta_beta
    return Topology(adj=adj, weights=np.where(adj, net.beta, 0.0))


def sparsify_top_fraction(net: NetworkRealization, q: float) -> Topology:
    """Keep the ceil(q*K*M) strongest links; ties break on (ue, rrh) order."""
    if not (0 < q <= 1):
        raise ValueError("q must lie in (0, 1]")
    K, M = net.beta.shape
    n_keep = math.ceil(q * K * M)
    flat = net.beta.ravel()  # row-major: index = k * M + m, so lexicographic in (k, m)
    order = np.lexsort((np.arange(flat.size), -flat))
    adj = np.zeros(K * M, dtype=bool)
    adj[order[:n_keep]] = True
    adj = adj.reshape(K, M)
    return Topology(adj=adj, weights=np.where(adj, net.beta, 0.0))


def default_estimation_pattern(topo: Topology) -> EstimationPattern:
    """Estimate every captured channel: the pattern coincides with the topology."""
    return EstimationPattern.from_edges(topo, topo.edges())


def build_conflict_graph(topo: Topology, pat: EstimationPattern) -> ConflictGraph:
    """Conflict graph over the estimation edges.

    Vertices (k, m) and (k', m') are adjacent iff they come from distinct
    UEs and at least one of the cross links (k, m') or (k', m) is in the
    topology; this covers the shared-RRH case m == m'.
    """
    if (pat.K, pat.M) != (topo.K, topo.M):
        raise ValueError("pattern and topology dimensions differ")
    vertices = sorted(pat.edges)
    n = len(vertices)
    adjacency: list[set[int]] = [set() for _ in range(n)]
    adj = topo.adj
    for i in range(n):
        k, m = vertices[i]
        for j in range(i + 1, n):
            kk, mm = vertices[j]
            if k == kk:
                continue
            if adj[k, mm] or adj[kk, m]:
                adjacency[i].add(j)
                adjacency[j].add(i)
    return ConflictGraph(
        vertices=vertices,
        adjacency=adjacency,
        K=topo.K,
        M=topo.M,
        isolated_ues=topo.isolated_ues,
    )


def _dsatur_coloring(cg: ConflictGraph) -> list[int]:
    """Greedy coloring, highest saturation first; ties by degree then index."""
    n = cg.n_vertices
    color = [-1] * n
    neighbor_colors: list[set[int]] = [set() for _ in range(n)]
    for _ in range(n):
        best = -1
        best_key = (-1, -1, 1)
        for v in range(n):
            if color[v] >= 0:
                continue
            key = (len(neighbor_colors[v]), cg.degree(v), -v)
            if key > best_key:
                best_key = key
                best = v
        c = 0
        while c in neighbor_colors[best]:
            c += 1
        color[best] = c
        for u in cg.adjacency[best]:
            neighbor_colors[u].add(c)
    return color


def color_assignment(cg: ConflictGraph) -> PilotAssignment:
    """Pilot assignment from a proper coloring of the conflict graph.

    Each color becomes one orthogonal pilot; a UE transmits the combination
    of the pilots its estimation edges received. UEs with no topology edge
    get pilot 1 by convention and are reported in isolated_ues.
    """
    if cg.n_vertices == 0:
        raise ValueError("conflict graph has no vertices")
    colors = _dsatur_coloring(cg)
    T = max(colors) + 1
    X = np.zeros((cg.K, T))
    serving: list[set[int]] = [set() for _ in range(cg.M)]
    for (k, m), c in zip(cg.vertices, colors):
        X[k, c] = 1.0
        serving[m].add(k)
    for k in cg.isolated_ues:
        X[k, 0] = 1.0
    return PilotAssignment(
        T=T, X=X, serving=serving, scheme="coloring",
        isolated_ues=cg.isolated_ues,
    )


def coded_multicast_assignment(topo: Topology) -> PilotAssignment:
    """Real-valued pilots from a Vandermonde generator; needs pattern == topology.

    The pilot dimension is the largest RRH neighborhood. UE k transmits the
    normalized combination (1, a_k, ..., a_k^(T-1)) with node a_k = k + 1;
    any T of those rows are linearly independent, so every RRH can invert
    its own neighborhood.
    """
    sizes = topo.adj.sum(axis=0)
    T = int(sizes.max())
    if T == 0:
        raise ValueError("topology has no edges")
    nodes = np.arange(1, topo.K + 1, dtype=float)
    X = nodes[:, None] ** np.arange(T)[None, :]
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    serving = [set(topo.ues_of_rrh(m)) for m in range(topo.M)]
    return PilotAssignment(
        T=T, X=X, serving=serving, scheme="coded-multicast",
        isolated_ues=topo.isolated_ues,
    )


def _rank(mat: np.ndarray, tol: float = RANK_TOL) -> int:
    if mat.size == 0 or min(mat.shape) == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0:
        return 0
    return int((s > tol * s[0]).sum())


def verify_assignment(
    X: np.ndarray,
    topo: Topology,
    pat: EstimationPattern,
    tol: float = RANK_TOL,
) -> tuple[bool, dict[int, dict]]:
    """Feasibility oracle: can every RRH separate its desired channels?

    For RRH m let D stack the pilot vectors of its estimation-pattern UEs
    and I those of its remaining connected UEs. The assignment is feasible
    at m iff rank([D | I]) = rank(I) + |D|: the desired pilot vectors stay
    independent after projecting out the significant interference.

    Returns the overall verdict plus per-RRH diagnostics.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != topo.K:
        raise ValueError("X must have one row per UE")
    if (pat.K, pat.M) != (topo.K, topo.M):
        raise ValueError("pattern and topology dimensions differ")
    ok_all = True
    diagnostics: dict[int, dict] = {}
    for m in range(topo.M):
        desired = pat.ues_of_rrh(m)
        interferers = [k for k in topo.ues_of_rrh(m) if k not in desired]
        D = X[list(desired), :].T if desired else np.zeros((X.shape[1], 0))
        I = X[interferers, :].T if interferers else np.zeros((X.shape[1], 0))
        rank_joint = _rank(np.hstack([D, I]), tol)
        rank_interf = _rank(I, tol)
        ok = rank_joint == rank_interf + len(desired)
        ok_all = ok_all and ok
        diagnostics[m] = {
            "ok": ok,
            "desired": desired,
            "interferers": tuple(interferers),
            "rank_joint": rank_joint,
            "rank_interference": rank_interf,
        }
    return ok_all, diagnostics
