"""Experiment orchestration: generate / assign / evaluate / verify / sweep.

Exit codes: 0 success, 1 usage error, 2 data or verification error.

Seeding layout: realization i draws its network from base_seed + i, and
every evaluation stream takes a seed derived from
SeedSequence([base_seed, i, crc32("scheme|g|kappa|T")]), so schemes are
compared on identical networks without sharing trial noise.
"""

from __future__ import annotations

import argparse
import json
import sys
import zlib
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import baselines, greedy, io, rates, smwim, topo as topomod
from .netgen import SimConfig, generate_network

__all__ = ["ExperimentSpec", "run", "main"]

SCHEMES = (
    "semi-random",
    "cellfree-greedy",
    "lrmc-semirandom",
    "smwim",
    "greedy",
    "coloring",
    "coded-multicast",
)

RESULTS_HEADER = ["scheme", "g_fraction", "kappa", "T", "user_id", "rate",
                  "seed", "realization_id", "status"]
SUMMARY_HEADER = ["scheme", "g_fraction", "kappa", "T", "n_realizations",
                  "sum_rate_mean", "sum_rate_std", "rate_p10", "rate_p50", "rate_p90"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


@dataclass
class ExperimentSpec:
    sim: SimConfig
    schemes: list[str]
    T_values: list[int]
    g_fractions: list[float]
    kappas: list[int]
    n_realizations: int
    n_trials: int
    base_seed: int
    kappa_u: int = 20
    delta: float = 1.0
    cellfree_greedy_iters: int = 10
    serving_policy: str = "uncontaminated"
    output_dir: str = "results"

    def __post_init__(self):
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}; choose from {SCHEMES}")
        if not self.T_values or any(t < 1 for t in self.T_values):
            raise ValueError("T_values must be positive")
        if max(self.T_values) > self.sim.tau_p:
            raise ValueError("max T exceeds tau_p; raise sim.tau_p")
        if not self.g_fractions or any(not (0 < g <= 1) for g in self.g_fractions):
            raise ValueError("g_fractions must lie in (0, 1]")
        if not self.kappas or any(k < 1 for k in self.kappas):
            raise ValueError("kappas must be positive")
        if self.n_realizations < 1 or self.n_trials < 1:
            raise ValueError("n_realizations and n_trials must be positive")

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            data = json.load(fh)
        sim = SimConfig(**data.pop("sim"))
        return cls(sim=sim, **data)


def derive_seed(base: int, realization: int, scheme: str, g, kappa, T) -> int:
    """Documented split function for per-context random streams."""
    tag = f"{scheme}|{g}|{kappa}|{T}"
    ss = np.random.SeedSequence([base, realization, zlib.crc32(tag.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def _scheme_points(spec: ExperimentSpec, scheme: str):
    """Sweep points (g, kappa, T) applicable to a scheme; None marks a free axis."""
    if scheme in ("semi-random", "cellfree-greedy"):
        return [(g, None, T) for g in spec.g_fractions for T in spec.T_values]
    if scheme in ("lrmc-semirandom", "coloring", "coded-multicast"):
        return [(g, None, None) for g in spec.g_fractions]
    return [(g, kappa, T) for g in spec.g_fractions for kappa in spec.kappas
            for T in spec.T_values]


def _nearest_rank(sorted_vals: np.ndarray, q: float) -> float:
    n = len(sorted_vals)
    idx = min(max(int(np.ceil(q * n)), 1), n)
    return float(sorted_vals[idx - 1])


def run(spec: ExperimentSpec, verbose: bool = False):
    """Execute the sweep; returns (results_path, summary_path)."""
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(spec.n_realizations):
        cfg_i = replace(spec.sim, seed=spec.base_seed + i)
        net = generate_network(cfg_i)
        topos = {g: topomod.sparsify_top_fraction(net, g) for g in spec.g_fractions}
        sequential_cache: dict[tuple, smwim.SequentialResult] = {}
        for scheme in spec.schemes:
            for g, kappa, T in _scheme_points(spec, scheme):
                seed_eval = derive_seed(spec.base_seed, i, scheme, g, kappa, T)
                try:
                    assignment = _make_assignment(
                        scheme, net, topos[g], g, kappa, T,
                        T_max=max(spec.T_values), kappa_u=spec.kappa_u,
                        delta=spec.delta, cf_iters=spec.cellfree_greedy_iters,
                        seed_assign=derive_seed(spec.base_seed, i, scheme + "/assign", g, kappa, T),
                        cache=sequential_cache,
                    )
                    result = rates.downlink_rate(
                        assignment, net, cfg_i, spec.n_trials, seed_eval,
                        topo=topos[g], policy=spec.serving_policy,
                    )
                    for k in range(net.K):
                        rows.append([scheme, g, _blank(kappa), _t_col(T, assignment),
                                     k, float(result.per_user_rate[k]),
                                     seed_eval, i, "ok"])
                except Exception as exc:   # record and continue
                    rows.append([scheme, g, _blank(kappa), _blank(T), -1, "",
                                 seed_eval, i, f"error:{type(exc).__name__}"])
        if verbose:
            print(f"realization {i + 1}/{spec.n_realizations} done", file=sys.stderr)

    rows.sort(key=lambda r: (r[7], r[0], _sortval(r[1]), _sortval(r[2]), _sortval(r[3]), r[4]))
    results_path = out_dir / "results.csv"
    io.write_rows_csv(results_path, RESULTS_HEADER, rows)
    summary_path = out_dir / "summary.csv"
    io.write_rows_csv(summary_path, SUMMARY_HEADER, _summarize(rows))
    return results_path, summary_path


def _blank(v):
    return "" if v is None else v


def _t_col(T, assignment):
    # sweep axis value when present, else the dimension the scheme chose
    return assignment.T if T is None else T


def _sortval(v):
    return (0, -1.0) if v in ("", None) else (1, float(v))


def _make_assignment(scheme, net, topo, g, kappa, T, T_max, kappa_u, delta,
                     cf_iters, seed_assign, cache):
    if scheme == "semi-random":
        return baselines.semi_random_assign(net.K, T, seed_assign)
    if scheme == "cellfree-greedy":
        return baselines.cellfree_greedy_assign(
            net, topo, T, n_iters=cf_iters, seed=seed_assign)
    if scheme == "lrmc-semirandom":
        pat = topomod.default_estimation_pattern(topo)
        return baselines.lrmc_plus_semirandom(topo, pat, seed=seed_assign)
    if scheme == "coloring":
        pat = topomod.default_estimation_pattern(topo)
        cg = topomod.build_conflict_graph(topo, pat)
        return topomod.color_assignment(cg)
    if scheme == "coded-multicast":
        return topomod.coded_multicast_assignment(topo)
    if scheme == "smwim":
        key = ("smwim", g, kappa)
        if key not in cache:
            cache[key] = smwim.sequential_assign(topo, T_max=T_max, kappa=kappa)
        return cache[key].to_assignment(T_budget=T)
    if scheme == "greedy":
        key = ("greedy", g, kappa)
        if key not in cache:
            cfg = greedy.GreedyConfig(T_max=T_max, kappa=kappa,
                                      kappa_u=kappa_u, delta=delta)
            cache[key] = greedy.greedy_assign(topo, cfg)
        return cache[key].to_assignment(T_budget=T)
    raise ValueError(f"unknown scheme {scheme!r}")


def _summarize(rows):
    groups: dict[tuple, dict] = {}
    for r in rows:
        if r[8] != "ok":
            continue
        key = (r[0], r[1], r[2], r[3])
        g = groups.setdefault(key, {"rates": [], "per_real": {}})
        g["rates"].append(r[5])
        g["per_real"].setdefault(r[7], 0.0)
        g["per_real"][r[7]] += r[5]
    out = []
    for key in sorted(groups, key=lambda k: (k[0], _sortval(k[1]), _sortval(k[2]), _sortval(k[3]))):
        g = groups[key]
        sums = np.array(sorted(g["per_real"].values()))
        vals = np.sort(np.array(g["rates"]))
        n_real = len(g["per_real"])
        std = float(np.std(sums, ddof=1)) if n_real > 1 else 0.0
        out.append([
            key[0], key[1], key[2], key[3], n_real,
            float(np.mean(sums)), std,
            _nearest_rank(vals, 0.10), _nearest_rank(vals, 0.50), _nearest_rank(vals, 0.90),
        ])
    return out


def _cmd_generate(args) -> int:
    cfg = io.load_sim_config(args.config)
    net = generate_network(cfg)
    io.save_network(net, args.out)
    print(f"wrote network ({net.K} UEs x {net.M} RRHs) to {args.out}.*")
    return 0


def _topo_for(net, g: float):
    return topomod.sparsify_top_fraction(net, g)


def _cmd_assign(args) -> int:
    net = io.load_network(args.network)
    topo = _topo_for(net, args.g)
    T = args.T
    if args.scheme in ("smwim", "greedy") and T is None:
        T = args.t_max
    if args.scheme in ("semi-random", "cellfree-greedy") and T is None:
        raise ValueError("--T is required for this scheme")
    assignment = _make_assignment(
        args.scheme, net, topo, args.g, args.kappa, T,
        T_max=max(T or 1, args.t_max), kappa_u=args.kappa_u, delta=args.delta,
        cf_iters=args.cellfree_greedy_iters, seed_assign=args.seed, cache={},
    )
    io.save_assignment(assignment, args.out, extra={"g_fraction": args.g, "kappa": args.kappa})
    print(f"scheme={args.scheme} T={assignment.T} written to {args.out}.*")
    return 0


def _cmd_evaluate(args) -> int:
    net = io.load_network(args.network)
    assignment, meta = io.load_assignment(args.assignment)
    cfg = io.load_sim_config(args.config) if args.config else SimConfig(
        M=net.M, K=net.K, seed=net.seed,
        tau_p=max(assignment.T, 20), N_c=max(200, assignment.T + 1))
    topo = _topo_for(net, meta.get("g_fraction", 1.0))
    result = rates.downlink_rate(assignment, net, cfg, args.trials, args.seed,
                                 topo=topo, policy=args.policy)
    rows = [[assignment.scheme, meta.get("g_fraction", ""), _blank(meta.get("kappa")),
             assignment.T, k, float(result.per_user_rate[k]), args.seed, 0, "ok"]
            for k in range(net.K)]
    io.write_rows_csv(args.out, RESULTS_HEADER, rows)
    print(f"sum rate {result.sum_rate!r} bits/s/Hz over {net.K} users -> {args.out}")
    return 0


def _cmd_verify(args) -> int:
    net = io.load_network(args.network)
    assignment, meta = io.load_assignment(args.assignment)
    topo = _topo_for(net, meta.get("g_fraction", 1.0))
    if assignment.serving is not None:
        edges = [(k, m) for m, ues in enumerate(assignment.serving) for k in ues]
        pat = topomod.EstimationPattern.from_edges(topo, edges)
    else:
        pat = topomod.default_estimation_pattern(topo)
    ok, diag = topomod.verify_assignment(assignment.X, topo, pat)
    bad = [m for m, d in diag.items() if not d["ok"]]
    print("feasible" if ok else f"infeasible at RRHs {bad}")
    return 0 if ok else 2


def _cmd_sweep(args) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    results_path, summary_path = run(spec, verbose=args.verbose)
    print(f"wrote {results_path} and {summary_path}")
    return 0


def main(argv=None) -> int:
    parser = _Parser(prog="tpa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a network realization")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("assign", help="run one scheme on a saved network")
    p.add_argument("--network", required=True)
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--t-max", type=int, default=8)
    p.add_argument("--kappa", type=int, default=1)
    p.add_argument("--kappa-u", type=int, default=20)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cellfree-greedy-iters", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_assign)

    p = sub.add_parser("evaluate", help="score a saved assignment")
    p.add_argument("--network", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", default="uncontaminated",
                   choices=("uncontaminated", "all-connected"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("verify", help="check feasibility of a saved assignment")
    p.add_argument("--network", required=True)
    p.add_argument("--assignment", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="run a full experiment spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
