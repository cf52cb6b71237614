import numpy as np

from tpa import io
from tpa.lrmc import CompletionProblem
from tpa.netgen import SimConfig, generate_network
from tpa.smwim import MwimInstance, sequential_assign
from tpa.topo import sparsify_top_fraction
from tpa import fixtures


def test_sim_config_round_trip(tmp_path):
    cfg = SimConfig(M=7, K=3, tau_p=5, N_c=60, seed=9, sigma_sh_db=4.0)
    path = tmp_path / "cfg.json"
    io.save_sim_config(cfg, path)
    assert io.load_sim_config(path) == cfg


def test_network_round_trip(tmp_path):
    net = generate_network(SimConfig(M=5, K=4, seed=2))
    io.save_network(net, tmp_path / "net")
    back = io.load_network(tmp_path / "net")
    assert np.allclose(back.beta, net.beta, rtol=1e-15)
    assert np.allclose(back.rrh_xy, net.rrh_xy, rtol=1e-15)
    assert back.seed == net.seed


def test_topology_csv_round_trip(tmp_path):
    topo, pat = fixtures.demo_topology()
    path = tmp_path / "topo.csv"
    io.save_topology_csv(topo, path, pattern=pat)
    back_topo, back_pat = io.load_topology_csv(path, topo.K, topo.M)
    assert np.array_equal(back_topo.adj, topo.adj)
    assert np.allclose(back_topo.weights, topo.weights)
    assert back_pat is not None and back_pat.edges == pat.edges


def test_assignment_round_trip(tmp_path):
    pa = fixtures.demo_assignment()
    io.save_assignment(pa, tmp_path / "asg", extra={"g_fraction": 0.4375})
    back, meta = io.load_assignment(tmp_path / "asg")
    assert np.array_equal(back.X, pa.X)
    assert back.T == pa.T
    assert [set(s) for s in back.serving] == [set(s) for s in pa.serving]
    assert meta["g_fraction"] == 0.4375


def test_completion_problem_round_trip(tmp_path):
    topo, pat = fixtures.demo_topology()
    prob = CompletionProblem.from_pattern(topo, pat)
    path = tmp_path / "prob.json"
    io.save_completion_problem(prob, path)
    back = io.load_completion_problem(path)
    assert back.K == prob.K and back.n_rows == prob.n_rows
    assert back.blocks == prob.blocks
    assert np.array_equal(back.omega[0], prob.omega[0])
    assert np.array_equal(back.pinned[2], prob.pinned[2])


def test_mwim_instance_round_trip(tmp_path):
    T = np.array([[1, 1], [0, 1]], dtype=np.int8)
    inst = MwimInstance(T_mat=T, T0_mat=T, B_mat=np.where(T, 0.25, 0.0), kappa=2)
    io.save_mwim_instance(inst, tmp_path / "inst")
    back = io.load_mwim_instance(tmp_path / "inst")
    assert np.array_equal(back.T_mat, inst.T_mat)
    assert np.allclose(back.B_mat, inst.B_mat)
    assert back.kappa == 2


def test_trace_csv(tmp_path):
    net = generate_network(SimConfig(M=6, K=3, seed=1))
    topo = sparsify_top_fraction(net, 0.5)
    seq = sequential_assign(topo, T_max=3, kappa=1)
    path = tmp_path / "trace.csv"
    io.write_trace_csv(seq, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "round,objective,cuts,runtime_s"
    assert len(lines) == 1 + len(seq.rounds)
