"""Sequential maximum weight induced matching via Benders decomposition.

Each pilot round solves one induced-matching problem: binary UE flags x and
RRH flags y, linked by z[k, m] = x[k] * y[m], maximizing the matched fading
weight subject to a per-RRH cap of kappa simultaneously transmitting
connected UEs. The master ILP carries the RRH-count term plus the weight
bound L; the slave and its closed-form dual generate the cuts. An exact
monolithic MILP of the same per-round problem serves as the testing oracle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .solver import solve_max_ilp
from .topo import PilotAssignment, Topology

__all__ = [
    "MwimInstance",
    "BendersCut",
    "RoundSolution",
    "SequentialResult",
    "solve_master",
    "solve_slave_dual",
    "benders_round",
    "solve_exact_milp",
    "sequential_assign",
]

DEFAULT_EPS = 1e-9
DEFAULT_MAX_ITERS = 50
ORACLE_GUARD = 24
UE_SPACE_THRESHOLD = 32   # larger masters switch to the UE-subset search


@dataclass
class MwimInstance:
    """One round's matching data.

    T_mat is the remaining adjacency, T0_mat the original one (the per-RRH
    cap always counts transmitters over the original connectivity), B_mat
    the remaining weights, supported on T_mat.
    """

    T_mat: np.ndarray    # (K, M) 0/1
    T0_mat: np.ndarray   # (K, M) 0/1
    B_mat: np.ndarray    # (K, M) >= 0
    kappa: int

    def __post_init__(self):
        self.T_mat = np.asarray(self.T_mat, dtype=np.int8)
        self.T0_mat = np.asarray(self.T0_mat, dtype=np.int8)
        self.B_mat = np.asarray(self.B_mat, dtype=float)
        if self.T_mat.shape != self.T0_mat.shape or self.T_mat.shape != self.B_mat.shape:
            raise ValueError("matrix shapes differ")
        if np.any((self.B_mat > 0) & (self.T_mat == 0)):
            raise ValueError("B_mat must be supported on T_mat")
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")

    @property
    def K(self) -> int:
        return self.T_mat.shape[0]

    @property
    def M(self) -> int:
        return self.T_mat.shape[1]


@dataclass
class BendersCut:
    """Affine upper bound L <= x_coeff @ x + y_coeff @ y + const."""

    x_coeff: np.ndarray   # (K,)
    y_coeff: np.ndarray   # (M,)
    const: float

    def value_at(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(self.x_coeff @ x + self.y_coeff @ y + self.const)


@dataclass
class RoundSolution:
    x: np.ndarray          # (K,) 0/1
    y: np.ndarray          # (M,) 0/1
    z: np.ndarray          # (K, M) in [0, 1]
    objective: float       # matched weight sum
    master_objective: float  # sum(y) + matched weight
    cuts_used: int
    converged: bool


@dataclass
class SequentialResult:
    T: int
    rounds: list[RoundSolution]
    X: np.ndarray                       # (K, T)
    Y: np.ndarray                       # (M, T)
    estimated: list[tuple[int, int, int]]   # (ue, rrh, round)
    trace: list[dict] = field(default_factory=list)
    scheme: str = "smwim"

    def serving_sets(self, T_budget: int | None = None) -> list[set[int]]:
        t_stop = self.T if T_budget is None else min(T_budget, self.T)
        M = self.Y.shape[0]
        serving: list[set[int]] = [set() for _ in range(M)]
        for k, m, t in self.estimated:
            if t < t_stop:
                serving[m].add(k)
        return serving

    def to_assignment(self, T_budget: int | None = None, seed: int | None = None) -> PilotAssignment:
        """Assignment for a reserved budget of T_budget pilot dimensions.

        Rounds are computed one pilot at a time, so the prefix of a longer
        run is exactly the result of running with the smaller budget. When
        the rounds ran out before the budget, the remaining reserved pilot
        columns stay silent (all-zero) but still count toward the training
        overhead, like the reserved-but-unused dimensions they model.
        """
        if T_budget is None:
            T_budget = self.T
        if T_budget < 1:
            raise ValueError("need at least one pilot dimension")
        t_stop = min(T_budget, self.T)
        K, M = self.X.shape[0], self.Y.shape[0]
        X = np.zeros((K, T_budget))
        Y = np.zeros((M, T_budget))
        X[:, :t_stop] = self.X[:, :t_stop]
        Y[:, :t_stop] = self.Y[:, :t_stop]
        return PilotAssignment(
            T=T_budget,
            X=X,
            Y=Y,
            serving=self.serving_sets(t_stop),
            scheme=self.scheme,
            seed=seed,
        )


def matched_weight(B_mat: np.ndarray, z: np.ndarray) -> float:
    """Canonical objective evaluation shared by all solvers."""
    return float(np.sum(B_mat * z))


def _master_matrices(inst: MwimInstance, cuts: list[BendersCut]):
    K, M = inst.K, inst.M
    n = K + M + 1  # [x, y, L]
    rows = []
    rhs = []
    # x_k <= sum_m T[k,m] y_m
    for k in range(K):
        row = np.zeros(n)
        row[k] = 1.0
        row[K:K + M] = -inst.T_mat[k, :]
        rows.append(row)
        rhs.append(0.0)
    # y_m <= sum_k T[k,m] x_k
    for m in range(M):
        row = np.zeros(n)
        row[K + m] = 1.0
        row[:K] = -inst.T_mat[:, m]
        rows.append(row)
        rhs.append(0.0)
    # sum_k T0[k,m] x_k <= kappa y_m + M_m (1 - y_m); the per-RRH degree is
    # the tightest valid big-M because the load can never exceed it
    for m in range(M):
        big_m = max(int(inst.T0_mat[:, m].sum()), inst.kappa)
        row = np.zeros(n)
        row[:K] = inst.T0_mat[:, m]
        row[K + m] = big_m - inst.kappa
        rows.append(row)
        rhs.append(float(big_m))
    # L <= cut(x, y)
    for cut in cuts:
        row = np.zeros(n)
        row[:K] = -cut.x_coeff
        row[K:K + M] = -cut.y_coeff
        row[-1] = 1.0
        rows.append(row)
        rhs.append(cut.const)
    return np.array(rows), np.array(rhs)


def _repair_xy(inst: MwimInstance, x_frac: np.ndarray, y_frac: np.ndarray):
    """Round a fractional master point onto a feasible (x, y).

    Per-RRH cap violations drop the weakest transmitters at the violating
    RRH; afterwards the two coverage constraints are enforced by a removal
    fixpoint, which can only loosen the cap further.
    """
    T = inst.T_mat
    x = (x_frac >= 0.5).astype(int)
    y = (y_frac >= 0.5).astype(int)
    while True:
        load = x @ inst.T0_mat
        viol = np.flatnonzero((y > 0) & (load > inst.kappa))
        if viol.size == 0:
            break
        m = int(viol[0])
        active = np.flatnonzero((x > 0) & (inst.T0_mat[:, m] > 0))
        order = sorted(active.tolist(), key=lambda k: (inst.B_mat[k, m], -k))
        for k in order[: int(load[m]) - inst.kappa]:
            x[k] = 0
    while True:
        x_new = x & ((T @ y) > 0)
        y_new = y & ((x_new @ T) > 0)
        if np.array_equal(x_new, x) and np.array_equal(y_new, y):
            break
        x, y = x_new, y_new
    return x, y


def _cut_limited_L(cuts: list[BendersCut], x, y, L_max: float) -> float:
    if not cuts:
        return L_max
    return max(0.0, min(L_max, min(cut.value_at(x, y) for cut in cuts)))


def _solve_master_ue_space(inst: MwimInstance, cuts: list[BendersCut]):
    """Exact master search over UE subsets only.

    For a fixed transmitter set S the best RRH set is forced: activate
    every RRH that is covered in the round topology and whose original-
    topology load stays within kappa. That choice maximizes the RRH count
    and every cut simultaneously because all cut coefficients are
    non-negative, so branching over the K UE flags with a monotone bound
    solves the master exactly with far fewer binaries than the ILP.
    """
    K, M = inst.K, inst.M
    T = inst.T_mat.astype(bool)
    T0i = inst.T0_mat.astype(np.int32)   # int, so masks @ T0i count the load
    L_max = float(inst.B_mat.sum())
    xcs = np.array([c.x_coeff for c in cuts]).reshape(len(cuts), K)
    ycs = np.array([c.y_coeff for c in cuts]).reshape(len(cuts), M)
    c0s = np.array([c.const for c in cuts]).reshape(len(cuts))
    if cuts and (xcs.min() < 0 or ycs.min() < 0):
        raise ValueError("UE-space master requires non-negative cut coefficients")

    degrees = T0i.sum(axis=1)
    order = sorted(range(K), key=lambda k: (-int(degrees[k]), k))
    order = [k for k in order if T[k].any()]

    def eligible(load, cover):
        return (load <= inst.kappa) & cover

    def point_value(s_mask):
        load = s_mask.astype(np.int32) @ T0i
        elig = eligible(load, (s_mask @ T) > 0)
        uncovered = s_mask & ~(T @ elig)
        while uncovered.any():
            s_mask = s_mask & ~uncovered
            load = s_mask.astype(np.int32) @ T0i
            elig = eligible(load, (s_mask @ T) > 0)
            uncovered = s_mask & ~(T @ elig)
        if cuts:
            L = _cut_limited_L(cuts, s_mask.astype(float), elig.astype(float), L_max)
        else:
            L = L_max
        return float(elig.sum()) + L, s_mask, elig

    best_val, best_s, best_e = point_value(np.zeros(K, dtype=bool))
    full = np.zeros(K, dtype=bool)
    full[order] = True
    cand_val, cand_s, cand_e = point_value(full)
    if cand_val > best_val:
        best_val, best_s, best_e = cand_val, cand_s, cand_e

    def bound(in_mask, avail_mask):
        load_in = in_mask.astype(np.int32) @ T0i
        cover_avail = (in_mask | avail_mask) @ T
        ub_elig = (load_in <= inst.kappa) & cover_avail
        n = float(ub_elig.sum())
        if not cuts:
            return n + L_max
        ub_cut = xcs @ (in_mask | avail_mask) + ycs @ ub_elig + c0s
        return n + max(0.0, min(L_max, float(ub_cut.min())))

    tol = 1e-12
    stack = [(0, np.zeros(K, dtype=bool))]
    while stack:
        idx, in_mask = stack.pop()
        if idx == len(order):
            continue
        avail = np.zeros(K, dtype=bool)
        avail[order[idx + 1:]] = True
        k = order[idx]
        for take in (False, True):
            child = in_mask.copy()
            child[k] = take
            b = bound(child, avail)
            if b <= best_val * (1 + 1e-12) + tol:
                continue
            val, s_fix, e_fix = point_value(child)
            if val > best_val:
                best_val, best_s, best_e = val, s_fix, e_fix
            if idx + 1 < len(order):
                stack.append((idx + 1, child))

    L = _cut_limited_L(cuts, best_s.astype(float), best_e.astype(float), L_max) if cuts else L_max
    return (best_s.astype(int), best_e.astype(int), L, best_val)


def solve_master(
    inst: MwimInstance,
    cuts: list[BendersCut],
    incumbent: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Solve the master ILP: max sum(y) + L under matching and cut constraints.

    With no cuts, L simply saturates at its upper bound ||B||_1, which seeds
    the gap criterion of the outer loop. Returns (x, y, L, value).
    """
    K, M = inst.K, inst.M
    L_max = float(inst.B_mat.sum())
    if K + M > UE_SPACE_THRESHOLD:
        return _solve_master_ue_space(inst, cuts)
    c = np.concatenate([np.zeros(K), np.ones(M), [1.0]])
    A_ub, b_ub = _master_matrices(inst, cuts)
    bounds = [(0.0, 1.0)] * (K + M) + [(0.0, L_max)]
    mask = np.concatenate([np.ones(K + M, dtype=bool), [False]])

    def repair(v):
        x, y = _repair_xy(inst, v[:K], v[K:K + M])
        return np.concatenate([x, y, [_cut_limited_L(cuts, x, y, L_max)]])

    res = solve_max_ilp(c, A_ub, b_ub, bounds, mask, incumbent=incumbent, repair=repair)
    if res.status == "infeasible":
        raise RuntimeError("master problem infeasible; this should be impossible")
    x = np.round(res.x[:K]).astype(int)
    y = np.round(res.x[K:K + M]).astype(int)
    L = float(res.x[-1])
    return x, y, L, float(res.value)


def solve_slave_dual(
    x_hat: np.ndarray,
    y_hat: np.ndarray,
    B_mat: np.ndarray,
    edge_mask: np.ndarray,
) -> tuple[np.ndarray, dict[str, np.ndarray], float]:
    """Closed-form slave optimum and one optimal dual point.

    The slave separates per edge: z = x * y. Per edge the dual picks
    (a, b, c) = (beta, 0, 0) when x <= y and (0, beta, 0) otherwise; both
    are feasible and attain the primal value, so strong duality is exact.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    edges = np.asarray(edge_mask, dtype=bool)
    z = np.where(edges, np.outer(x_hat, y_hat), 0.0)
    x_le_y = x_hat[:, None] <= y_hat[None, :]
    a = np.where(edges & x_le_y, B_mat, 0.0)
    b = np.where(edges & ~x_le_y, B_mat, 0.0)
    c = np.zeros_like(B_mat)
    objective = matched_weight(B_mat, z)
    return z, {"a": a, "b": b, "c": c}, objective


def cut_from_duals(duals: dict[str, np.ndarray]) -> BendersCut:
    a, b, c = duals["a"], duals["b"], duals["c"]
    return BendersCut(
        x_coeff=(a + c).sum(axis=1),
        y_coeff=(b + c).sum(axis=0),
        const=float(-c.sum()),
    )


def benders_round(
    inst: MwimInstance,
    eps: float = DEFAULT_EPS,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> RoundSolution:
    """One pilot round of alternating master / slave solves.

    Stops when the master's bound meets the incumbent (proven optimum) or
    when successive weight-bound values stabilize within eps; the iteration
    cap returns the best incumbent with converged=False.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    K, M = inst.K, inst.M
    edges = inst.T_mat.astype(bool)
    if not edges.any():
        zero = RoundSolution(
            x=np.zeros(K, dtype=int), y=np.zeros(M, dtype=int),
            z=np.zeros((K, M)), objective=0.0, master_objective=0.0,
            cuts_used=0, converged=True,
        )
        return zero

    cuts: list[BendersCut] = []
    L_prev = float(inst.B_mat.sum())
    best: RoundSolution | None = None
    incumbent_vec: np.ndarray | None = None
    converged = False
    for _ in range(max_iters):
        x, y, _, master_val = solve_master(inst, cuts, incumbent=incumbent_vec)
        z, duals, slave_val = solve_slave_dual(x, y, inst.B_mat, edges)
        total = float(y.sum()) + slave_val
        if best is None or total > best.master_objective:
            best = RoundSolution(
                x=x, y=y, z=z, objective=slave_val, master_objective=total,
                cuts_used=len(cuts), converged=False,
            )
        # the master value upper-bounds the round optimum: accept the
        # incumbent once it is provably within relative 1e-9 of it
        if master_val <= total + 1e-9 * max(1.0, abs(total)):
            converged = True
            break
        cuts.append(cut_from_duals(duals))
        if abs(slave_val - L_prev) <= eps:
            converged = True
            break
        L_prev = slave_val
        L_inc = min(
            float(inst.B_mat.sum()),
            min(cut.value_at(best.x, best.y) for cut in cuts),
        )
        incumbent_vec = np.concatenate([best.x, best.y, [max(L_inc, 0.0)]])

    assert best is not None
    best.cuts_used = len(cuts)
    best.converged = converged
    return best


def solve_exact_milp(inst: MwimInstance, guard: int = ORACLE_GUARD) -> RoundSolution:
    """Monolithic MILP for one round, used as the testing oracle.

    Optimizes the same per-round objective the decomposition converges to,
    sum(y) plus the matched weight, with the z-linking constraints written
    out and z relaxed to [0, 1] (lossless given binary x, y).
    """
    K, M = inst.K, inst.M
    if K + M > guard:
        raise ValueError(f"instance with {K + M} binaries exceeds oracle guard {guard}")
    edges = list(zip(*np.nonzero(inst.T_mat)))
    nE = len(edges)
    n = K + M + nE
    c = np.concatenate([
        np.zeros(K),
        np.ones(M),
        np.array([inst.B_mat[k, m] for k, m in edges], dtype=float),
    ])
    rows, rhs = [], []
    for k in range(K):
        row = np.zeros(n)
        row[k] = 1.0
        row[K:K + M] = -inst.T_mat[k, :]
        rows.append(row)
        rhs.append(0.0)
    for m in range(M):
        row = np.zeros(n)
        row[K + m] = 1.0
        row[:K] = -inst.T_mat[:, m]
        rows.append(row)
        rhs.append(0.0)
    for m in range(M):
        big_m = max(int(inst.T0_mat[:, m].sum()), inst.kappa)
        row = np.zeros(n)
        row[:K] = inst.T0_mat[:, m]
        row[K + m] = big_m - inst.kappa
        rows.append(row)
        rhs.append(float(big_m))
    for e, (k, m) in enumerate(edges):
        r1 = np.zeros(n); r1[K + M + e] = 1.0; r1[k] = -1.0
        r2 = np.zeros(n); r2[K + M + e] = 1.0; r2[K + m] = -1.0
        r3 = np.zeros(n); r3[k] = 1.0; r3[K + m] = 1.0; r3[K + M + e] = -1.0
        rows.extend([r1, r2, r3])
        rhs.extend([0.0, 0.0, 1.0])
    A_ub = np.array(rows) if rows else None
    b_ub = np.array(rhs) if rows else None
    bounds = [(0.0, 1.0)] * n
    mask = np.concatenate([np.ones(K + M, dtype=bool), np.zeros(nE, dtype=bool)])

    def repair(v):
        x, y = _repair_xy(inst, v[:K], v[K:K + M])
        z = np.array([x[k] * y[m] for k, m in edges], dtype=float)
        return np.concatenate([x, y, z])

    res = solve_max_ilp(c, A_ub, b_ub, bounds, mask, repair=repair)
    x = np.round(res.x[:K]).astype(int)
    y = np.round(res.x[K:K + M]).astype(int)
    z = np.zeros((K, M))
    for e, (k, m) in enumerate(edges):
        z[k, m] = np.round(res.x[K + M + e])
    weight = matched_weight(inst.B_mat, z)
    return RoundSolution(
        x=x, y=y, z=z, objective=weight,
        master_objective=float(y.sum()) + weight,
        cuts_used=0, converged=res.status == "optimal",
    )


def sequential_assign(
    topo: Topology,
    T_max: int,
    kappa: int,
    eps: float = DEFAULT_EPS,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> SequentialResult:
    """Run one Benders round per pilot until the budget or the topology runs out.

    Matched edges are removed between rounds and the remaining weights
    reweighed; the per-RRH cap keeps counting transmitters over the original
    topology, so a UE that stays silent on a pilot never re-contaminates an
    RRH it was already matched at.
    """
    if T_max < 1:
        raise ValueError("T_max must be >= 1")
    T_cur = topo.adj.astype(np.int8).copy()
    B_cur = topo.weights.copy()
    rounds: list[RoundSolution] = []
    trace: list[dict] = []
    estimated: list[tuple[int, int, int]] = []
    while len(rounds) < T_max and T_cur.any():
        inst = MwimInstance(T_mat=T_cur, T0_mat=topo.adj.astype(np.int8),
                            B_mat=B_cur, kappa=kappa)
        tic = time.perf_counter()
        sol = benders_round(inst, eps=eps, max_iters=max_iters)
        elapsed = time.perf_counter() - tic
        z_bool = sol.z > 0.5
        if not z_bool.any():
            break
        t = len(rounds)
        rounds.append(sol)
        trace.append({
            "round": t + 1,
            "objective": sol.objective,
            "cuts": sol.cuts_used,
            "runtime_s": elapsed,
        })
        for k, m in zip(*np.nonzero(z_bool)):
            estimated.append((int(k), int(m), t))
        T_cur = (T_cur.astype(bool) & ~z_bool).astype(np.int8)
        B_cur = B_cur * T_cur
    T_used = len(rounds)
    if T_used == 0:
        raise ValueError("no pilot round produced a matching (empty topology?)")
    X = np.stack([r.x for r in rounds], axis=1).astype(float)
    Y = np.stack([r.y for r in rounds], axis=1).astype(float)
    return SequentialResult(T=T_used, rounds=rounds, X=X, Y=Y,
                            estimated=estimated, trace=trace)
