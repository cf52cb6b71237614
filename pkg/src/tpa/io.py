"""File formats: config JSON, network/topology/assignment CSVs, results tables.

All writers format floats with repr (shortest round-trip form) and fix row
order, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .lrmc import CompletionProblem
from .netgen import NetworkRealization, SimConfig
from .smwim import MwimInstance, SequentialResult
from .topo import EstimationPattern, PilotAssignment, Topology

__all__ = [
    "load_sim_config",
    "save_sim_config",
    "save_network",
    "load_network",
    "save_topology_csv",
    "load_topology_csv",
    "save_assignment",
    "load_assignment",
    "save_completion_problem",
    "load_completion_problem",
    "save_mwim_instance",
    "load_mwim_instance",
    "write_trace_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_rows_csv",
]


def _p(prefix, suffix: str) -> Path:
    """Sibling file path <prefix><suffix>; avoids Path.with_suffix dot surprises."""
    prefix = Path(prefix)
    return prefix.parent / (prefix.name + suffix)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_matrix_csv(mat: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in np.atleast_2d(mat):
            w.writerow([_fmt(v) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([[float(v) for v in row] for row in csv.reader(fh)])


def write_rows_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def save_sim_config(cfg: SimConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_sim_config(path) -> SimConfig:
    with open(path) as fh:
        data = json.load(fh)
    return SimConfig(**data)


def save_network(net: NetworkRealization, prefix) -> None:
    """Write positions CSV, dense beta CSV (row = UE), and a JSON sidecar."""
    prefix = Path(prefix)
    rows = [["rrh", m, net.rrh_xy[m, 0], net.rrh_xy[m, 1]] for m in range(net.M)]
    rows += [["ue", k, net.ue_xy[k, 0], net.ue_xy[k, 1]] for k in range(net.K)]
    write_rows_csv(_p(prefix, ".positions.csv"), ["kind", "index", "x_km", "y_km"], rows)
    write_matrix_csv(net.beta, _p(prefix, ".beta.csv"))
    meta = {"K": net.K, "M": net.M, "noise_power_dbm": net.noise_power_dbm, "seed": net.seed}
    with open(_p(prefix, ".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_network(prefix) -> NetworkRealization:
    prefix = Path(prefix)
    with open(_p(prefix, ".meta.json")) as fh:
        meta = json.load(fh)
    beta = read_matrix_csv(_p(prefix, ".beta.csv"))
    rrh = np.zeros((meta["M"], 2))
    ue = np.zeros((meta["K"], 2))
    with open(_p(prefix, ".positions.csv"), newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            xy = (float(row["x_km"]), float(row["y_km"]))
            if row["kind"] == "rrh":
                rrh[int(row["index"])] = xy
            elif row["kind"] == "ue":
                ue[int(row["index"])] = xy
            else:
                raise ValueError(f"unknown position kind {row['kind']!r}")
    return NetworkRealization(
        rrh_xy=rrh, ue_xy=ue, beta=beta,
        noise_power_dbm=meta["noise_power_dbm"], seed=meta["seed"],
    )


def save_topology_csv(topo: Topology, path, pattern: EstimationPattern | None = None) -> None:
    """Edge list (ue, rrh, beta); with a pattern, an estimated 0/1 column is added."""
    rows = []
    for k, m in topo.edges():
        row = [k, m, topo.weights[k, m]]
        if pattern is not None:
            row.append(1 if (k, m) in pattern.edges else 0)
        rows.append(row)
    header = ["ue", "rrh", "beta"] + (["estimated"] if pattern is not None else [])
    write_rows_csv(path, header, rows)


def load_topology_csv(path, K: int, M: int) -> tuple[Topology, EstimationPattern | None]:
    adj = np.zeros((K, M), dtype=bool)
    weights = np.zeros((K, M))
    pat_edges = []
    has_pattern = False
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            k, m = int(row["ue"]), int(row["rrh"])
            adj[k, m] = True
            weights[k, m] = float(row["beta"])
            if "estimated" in row and row["estimated"] is not None:
                has_pattern = True
                if int(row["estimated"]):
                    pat_edges.append((k, m))
    topo = Topology(adj=adj, weights=weights)
    pat = EstimationPattern.from_edges(topo, pat_edges) if has_pattern else None
    return topo, pat


def save_assignment(pa: PilotAssignment, prefix, extra: dict | None = None) -> None:
    prefix = Path(prefix)
    write_matrix_csv(pa.X, _p(prefix, ".X.csv"))
    meta = {
        "T": pa.T,
        "scheme": pa.scheme,
        "seed": pa.seed,
        "isolated_ues": list(pa.isolated_ues),
        "serving": None if pa.serving is None else [sorted(s) for s in pa.serving],
    }
    if extra:
        meta.update(extra)
    with open(_p(prefix, ".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_completion_problem(prob: CompletionProblem, path) -> None:
    """Index-list dump for regression fixtures."""
    om_r, om_c = prob.omega
    pin_r, pin_c, pin_v = prob.pinned
    data = {
        "K": prob.K,
        "n_rows": prob.n_rows,
        "blocks": [[m, row0, list(t_m), list(t_e)] for m, row0, t_m, t_e in prob.blocks],
        "omega": [om_r.tolist(), om_c.tolist()],
        "pinned": [pin_r.tolist(), pin_c.tolist(), pin_v.tolist()],
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_completion_problem(path) -> CompletionProblem:
    with open(path) as fh:
        data = json.load(fh)
    return CompletionProblem(
        K=data["K"],
        n_rows=data["n_rows"],
        blocks=[(m, row0, tuple(t_m), tuple(t_e)) for m, row0, t_m, t_e in data["blocks"]],
        omega=(np.array(data["omega"][0], dtype=int), np.array(data["omega"][1], dtype=int)),
        pinned=(np.array(data["pinned"][0], dtype=int), np.array(data["pinned"][1], dtype=int),
                np.array(data["pinned"][2], dtype=float)),
    )


def save_mwim_instance(inst: MwimInstance, prefix) -> None:
    """Matching-instance dump (adjacencies, weights, cap) for fixtures."""
    prefix = Path(prefix)
    write_matrix_csv(inst.T_mat.astype(float), _p(prefix, ".T.csv"))
    write_matrix_csv(inst.T0_mat.astype(float), _p(prefix, ".T0.csv"))
    write_matrix_csv(inst.B_mat, _p(prefix, ".B.csv"))
    with open(_p(prefix, ".meta.json"), "w") as fh:
        json.dump({"kappa": inst.kappa}, fh, sort_keys=True)
        fh.write("\n")


def load_mwim_instance(prefix) -> MwimInstance:
    prefix = Path(prefix)
    with open(_p(prefix, ".meta.json")) as fh:
        meta = json.load(fh)
    return MwimInstance(
        T_mat=read_matrix_csv(_p(prefix, ".T.csv")).astype(np.int8),
        T0_mat=read_matrix_csv(_p(prefix, ".T0.csv")).astype(np.int8),
        B_mat=read_matrix_csv(_p(prefix, ".B.csv")),
        kappa=meta["kappa"],
    )


def write_trace_csv(result: SequentialResult, path) -> None:
    """Per-round trace: round index, matched weight, cut count, runtime."""
    rows = [[t["round"], t["objective"], t["cuts"], t["runtime_s"]] for t in result.trace]
    write_rows_csv(path, ["round", "objective", "cuts", "runtime_s"], rows)


def load_assignment(prefix) -> tuple[PilotAssignment, dict]:
    prefix = Path(prefix)
    with open(_p(prefix, ".meta.json")) as fh:
        meta = json.load(fh)
    X = read_matrix_csv(_p(prefix, ".X.csv"))
    serving = meta["serving"]
    pa = PilotAssignment(
        T=meta["T"],
        X=X,
        serving=None if serving is None else [set(s) for s in serving],
        scheme=meta["scheme"],
        seed=meta["seed"],
        isolated_ues=tuple(meta.get("isolated_ues", [])),
    )
    return pa, meta
