import itertools

import numpy as np
import pytest

from tpa.netgen import NetworkRealization
from tpa.topo import (
    EstimationPattern,
    Topology,
    build_conflict_graph,
    coded_multicast_assignment,
    color_assignment,
    default_estimation_pattern,
    sparsify_threshold,
    sparsify_top_fraction,
    verify_assignment,
)
from tpa import fixtures

from helpers import random_topology, random_topology_with_pattern


def tiny_net(beta):
    beta = np.asarray(beta, dtype=float)
    K, M = beta.shape
    return NetworkRealization(
        rrh_xy=np.zeros((M, 2)), ue_xy=np.zeros((K, 2)),
        beta=beta, noise_power_dbm=-92.0, seed=0,
    )


def test_threshold_elementwise():
    net = tiny_net([[3.0, 1.0], [2.0, 4.0]])
    topo = sparsify_threshold(net, 2.0)
    assert np.array_equal(topo.adj, [[True, False], [True, True]])
    assert topo.weights[0, 0] == 3.0 and topo.weights[0, 1] == 0.0


def test_threshold_extremes():
    net = tiny_net([[3.0, 1.0], [2.0, 4.0]])
    assert sparsify_threshold(net, 1.0).n_edges == 4
    empty = sparsify_threshold(net, 5.0)
    assert empty.n_edges == 0
    assert empty.has_isolated_ues
    assert empty.isolated_ues == (0, 1)


def test_top_fraction_counts_and_order():
    net = tiny_net([[3.0, 1.0], [2.0, 4.0]])
    topo = sparsify_top_fraction(net, 0.5)
    assert topo.edges() == [(0, 0), (1, 1)]
    assert sparsify_top_fraction(net, 1.0).n_edges == 4


def test_top_fraction_exact_count():
    rng = np.random.default_rng(3)
    net = tiny_net(rng.uniform(0.1, 1.0, (8, 10)))
    assert sparsify_top_fraction(net, 0.75).n_edges == int(np.ceil(0.75 * 80))


def test_top_fraction_tie_break_lexicographic():
    net = tiny_net([[2.0, 2.0], [2.0, 2.0]])
    topo = sparsify_top_fraction(net, 0.5)
    assert topo.edges() == [(0, 0), (0, 1)]


def test_top_fraction_one_matches_threshold_at_min():
    rng = np.random.default_rng(4)
    net = tiny_net(rng.uniform(0.1, 1.0, (5, 7)))
    t1 = sparsify_top_fraction(net, 1.0)
    t2 = sparsify_threshold(net, net.beta.min())
    assert np.array_equal(t1.adj, t2.adj)


def test_default_pattern_covers_all_edges():
    rng = np.random.default_rng(5)
    topo = random_topology(rng)
    pat = default_estimation_pattern(topo)
    assert pat.n_edges == topo.n_edges
    empty = Topology(adj=np.zeros((2, 2), dtype=bool), weights=np.zeros((2, 2)))
    assert default_estimation_pattern(empty).n_edges == 0


def test_pattern_rejects_non_topology_edge():
    topo = Topology(adj=np.array([[True, False]]), weights=np.array([[1.0, 0.0]]))
    with pytest.raises(ValueError):
        EstimationPattern.from_edges(topo, [(0, 1)])


def test_conflict_graph_fixture_adjacency():
    topo, pat = fixtures.demo_topology()
    cg = build_conflict_graph(topo, pat)
    idx = {v: i for i, v in enumerate(cg.vertices)}
    # same UE never conflicts
    assert idx[(0, 1)] not in cg.adjacency[idx[(0, 0)]]
    # cross link (1, 0) makes UE 0 and UE 1 edges conflict
    assert idx[(1, 1)] in cg.adjacency[idx[(0, 0)]]
    # UE 0 interferes RRH 3, so (0,0) conflicts with (3,3)
    assert idx[(3, 3)] in cg.adjacency[idx[(0, 0)]]
    # disjoint neighborhoods: UE 0 and UE 3 share no RRH, no cross links
    assert idx[(3, 6)] not in cg.adjacency[idx[(0, 0)]]


def test_conflict_graph_symmetric_irreflexive():
    rng = np.random.default_rng(6)
    for _ in range(20):
        topo, pat = random_topology_with_pattern(rng, sub_fraction=0.7)
        cg = build_conflict_graph(topo, pat)
        for i, nbrs in enumerate(cg.adjacency):
            assert i not in nbrs
            for j in nbrs:
                assert i in cg.adjacency[j]


def test_coloring_edgeless_conflicts_share_one_pilot():
    # two UEs with disjoint RRH neighborhoods never conflict
    topo = Topology(
        adj=np.array([[True, False], [False, True]]),
        weights=np.array([[1.0, 0.0], [0.0, 2.0]]),
    )
    pa = color_assignment(build_conflict_graph(topo, default_estimation_pattern(topo)))
    assert pa.T == 1
    assert np.array_equal(pa.X, [[1.0], [1.0]])


def test_coloring_clique_needs_all_colors():
    # all UEs hit the same single RRH: pairwise conflicts, n colors
    n = 5
    topo = Topology(
        adj=np.ones((n, 1), dtype=bool),
        weights=np.arange(1.0, n + 1).reshape(n, 1),
    )
    pa = color_assignment(build_conflict_graph(topo, default_estimation_pattern(topo)))
    assert pa.T == n


def test_coloring_fixture_two_pilots():
    topo, pat = fixtures.demo_topology()
    pa = color_assignment(build_conflict_graph(topo, pat))
    assert pa.T == 2
    ok, _ = verify_assignment(pa.X, topo, pat)
    assert ok


def test_coloring_always_verifies():
    rng = np.random.default_rng(7)
    for _ in range(60):
        topo, pat = random_topology_with_pattern(rng)
        pa = color_assignment(build_conflict_graph(topo, pat))
        ok, _ = verify_assignment(pa.X, topo, pat)
        assert ok


def test_coded_multicast_dimension_and_verification():
    rng = np.random.default_rng(8)
    for _ in range(40):
        topo = random_topology(rng)
        pa = coded_multicast_assignment(topo)
        assert pa.T == int(topo.adj.sum(axis=0).max())
        ok, _ = verify_assignment(pa.X, topo, default_estimation_pattern(topo))
        assert ok


def test_coded_multicast_single_ue_per_rrh():
    topo = Topology(
        adj=np.array([[True, True, True]]),
        weights=np.array([[1.0, 2.0, 3.0]]),
    )
    assert coded_multicast_assignment(topo).T == 1


def test_vandermonde_submatrices_invertible():
    K, T = 5, 3
    nodes = np.arange(1.0, K + 1)
    X = nodes[:, None] ** np.arange(T)[None, :]
    for rows in itertools.combinations(range(K), T):
        det = np.linalg.det(X[list(rows), :])
        assert abs(det) > 1e-9


def test_verify_accepts_identity():
    rng = np.random.default_rng(9)
    for _ in range(50):
        topo, pat = random_topology_with_pattern(rng)
        ok, _ = verify_assignment(np.eye(topo.K), topo, pat)
        assert ok


def test_verify_rejects_shared_pilot_contamination():
    # two UEs on one pilot, both estimated at the same RRH
    topo = Topology(
        adj=np.array([[True], [True]]),
        weights=np.array([[1.0], [2.0]]),
    )
    pat = default_estimation_pattern(topo)
    X = np.array([[1.0], [1.0]])
    ok, diag = verify_assignment(X, topo, pat)
    assert not ok
    assert not diag[0]["ok"]


def test_verify_fixture_assignment():
    topo, pat = fixtures.demo_topology()
    pa = fixtures.demo_assignment()
    ok, diag = verify_assignment(pa.X, topo, pat)
    assert ok
    assert all(d["ok"] for d in diag.values())


def test_verify_invariances():
    rng = np.random.default_rng(10)
    for _ in range(20):
        topo, pat = random_topology_with_pattern(rng, K=4, M=6)
        pa = color_assignment(build_conflict_graph(topo, pat))
        X = pa.X
        ok_base, _ = verify_assignment(X, topo, pat)
        perm = rng.permutation(X.shape[1])
        ok_perm, _ = verify_assignment(X[:, perm], topo, pat)
        assert ok_perm == ok_base
        while True:
            R = rng.standard_normal((X.shape[1], X.shape[1]))
            if abs(np.linalg.det(R)) > 0.1:
                break
        ok_rot, _ = verify_assignment(X @ R, topo, pat)
        assert ok_rot == ok_base


def test_verify_dimension_mismatch():
    topo, pat = fixtures.demo_topology()
    with pytest.raises(ValueError):
        verify_assignment(np.ones((3, 2)), topo, pat)


def test_isolated_ue_gets_first_pilot():
    adj = np.array([[True, False], [False, False]])
    topo = Topology(adj=adj, weights=np.where(adj, 1.0, 0.0))
    pat = EstimationPattern.from_edges(topo, [(0, 0)])
    pa = color_assignment(build_conflict_graph(topo, pat))
    assert pa.isolated_ues == (1,)
    assert pa.X[1, 0] == 1.0
