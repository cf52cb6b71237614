"""Pilot dimension minimization by alternating-projection matrix completion.

The stacked per-RRH combining matrix has a block of |T_m| rows per RRH.
Columns of connected-but-unwanted UEs are pinned to zero inside the block,
and the wanted columns carry an identity sub-block so every RRH keeps full
column rank over its estimation set. For each candidate rank, projections
alternate between the rank ball (SVD truncation) and that affine structure;
the smallest rank whose iteration converges is the achieved pilot dimension.
The completed matrix is then factorized into a binary pilot matrix by
alternating least squares with rounding, guarded by the feasibility oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topo import EstimationPattern, Topology, verify_assignment

__all__ = [
    "CompletionProblem",
    "CompletionResult",
    "FactorizationFailed",
    "project_rank",
    "project_affine",
    "complete",
    "factorize_binary",
]

DEFAULT_EPS = 1e-5
DEFAULT_IT_MAX = 2000
RANK_TOL = 1e-6
ENTRY_TOL = 1e-4
STALL_WINDOW = 100
DEFAULT_RESTARTS = 3


class FactorizationFailed(RuntimeError):
    """Raised when no restart yields a binary factor passing the oracle."""


@dataclass
class CompletionProblem:
    """Index structure of the partially specified stacked matrix.

    blocks lists, per RRH with at least one connected UE, the sorted UE
    indices of its row block and the block's starting row. omega holds the
    zero-pinned coordinates, pinned the identity sub-block coordinates with
    their 0/1 values.
    """

    K: int
    n_rows: int
    blocks: list[tuple[int, int, tuple[int, ...], tuple[int, ...]]]  # (rrh, row0, T_m, T_E_m)
    omega: tuple[np.ndarray, np.ndarray]            # zero-forced coordinates
    pinned: tuple[np.ndarray, np.ndarray, np.ndarray]   # identity-block (rows, cols, vals)

    @classmethod
    def from_pattern(cls, topo: Topology, pat: EstimationPattern) -> "CompletionProblem":
        blocks = []
        om_r, om_c = [], []
        pin_r, pin_c, pin_v = [], [], []
        row0 = 0
        for m in range(topo.M):
            t_m = topo.ues_of_rrh(m)
            if not t_m:
                continue
            t_e = pat.ues_of_rrh(m)
            blocks.append((m, row0, t_m, t_e))
            rows = range(row0, row0 + len(t_m))
            interferers = [k for k in t_m if k not in t_e]
            for r in rows:
                for k in interferers:
                    om_r.append(r)
                    om_c.append(k)
            for i in range(len(t_e)):       # identity block in the first |T_E,m| rows
                for j, k in enumerate(t_e):
                    pin_r.append(row0 + i)
                    pin_c.append(k)
                    pin_v.append(1.0 if i == j else 0.0)
            row0 += len(t_m)
        return cls(
            K=topo.K,
            n_rows=row0,
            blocks=blocks,
            omega=(np.array(om_r, dtype=int), np.array(om_c, dtype=int)),
            pinned=(np.array(pin_r, dtype=int), np.array(pin_c, dtype=int),
                    np.array(pin_v, dtype=float)),
        )

    @property
    def rank_lower_bound(self) -> int:
        """The largest identity block forces at least this rank."""
        return max((len(t_e) for _, _, _, t_e in self.blocks), default=0)


@dataclass
class CompletionResult:
    T: int
    A: np.ndarray
    converged: bool
    iterations_used: int
    residual: float


def project_rank(A: np.ndarray, r: int) -> np.ndarray:
    """Best Frobenius rank-r approximation by singular value truncation."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    if r >= min(A.shape):
        return A.copy()
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    return (u[:, :r] * s[:r]) @ vt[:r, :]


def project_affine(B: np.ndarray, prob: CompletionProblem) -> np.ndarray:
    """Pin zero-forced entries to 0 and identity-block entries to their values."""
    if B.shape != (prob.n_rows, prob.K):
        raise ValueError("shape mismatch with completion problem")
    A = B.copy()
    om_r, om_c = prob.omega
    A[om_r, om_c] = 0.0
    pin_r, pin_c, pin_v = prob.pinned
    A[pin_r, pin_c] = pin_v
    return A


def _attempt(prob, r, rng, eps, it_max):
    """One alternating-projection run at fixed rank from a random start."""
    A = rng.standard_normal((prob.n_rows, prob.K))
    gap_prev = np.inf
    stall = 0
    for it in range(1, it_max + 1):
        B = project_rank(A, r)
        A_next = project_affine(B, prob)
        gap = float(np.linalg.norm(A_next - B))
        if gap <= eps:
            return B, it, gap   # B is exactly rank <= r and affine-feasible within gap
        if gap >= gap_prev - eps * 1e-3:
            stall += 1
            if stall >= STALL_WINDOW:
                return None, it, gap
        else:
            stall = 0
        gap_prev = gap
        A = A_next
    return None, it_max, gap


def _dedicated_completion(prob: CompletionProblem) -> np.ndarray:
    """Trivial rank-K feasible point: one dedicated pilot per UE."""
    A = np.zeros((prob.n_rows, prob.K))
    for _, row0, t_m, t_e in prob.blocks:
        for i, k in enumerate(t_m):
            if k in t_e:
                A[row0 + i, k] = 1.0
    return project_affine(A, prob)


def complete(
    prob: CompletionProblem,
    rank_schedule=None,
    eps: float = DEFAULT_EPS,
    it_max: int = DEFAULT_IT_MAX,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    stop_on_failure: bool = True,
) -> CompletionResult:
    """Descend over candidate ranks and return the smallest one that converges.

    Ranks below the identity-block bound are provably infeasible and are
    skipped. The reported dimension is an upper bound on the true minimum:
    alternating projection onto a non-convex set may miss feasible ranks,
    which with stop_on_failure ends the descent at the first failed rank.
    """
    rng = np.random.default_rng(seed)
    lb = max(prob.rank_lower_bound, 1)
    if rank_schedule is None:
        rank_schedule = range(prob.K, lb - 1, -1)
    schedule = [r for r in rank_schedule if r >= lb]
    best: CompletionResult | None = None
    for r in sorted(set(schedule), reverse=True):
        found = None
        for _ in range(restarts):
            A, its, gap = _attempt(prob, r, rng, eps, it_max)
            if A is not None:
                found = CompletionResult(T=r, A=A, converged=True,
                                         iterations_used=its, residual=gap)
                break
        if found is None:
            if stop_on_failure:
                break
            continue
        best = found
    if best is None:
        return CompletionResult(
            T=prob.K, A=_dedicated_completion(prob), converged=False,
            iterations_used=0, residual=0.0,
        )
    return best


def _binary_step(C: np.ndarray, A_unit: np.ndarray, codebook: np.ndarray | None) -> np.ndarray:
    """Best binary pilot row per UE for a fixed combining factor C.

    Column scale carries no pilot information, so with a codebook (all
    binary vectors, feasible for small pilot counts) each column picks the
    binary combination with the largest squared cosine to its direction;
    otherwise a scale-matched unconstrained solution is rounded onto {0, 1}.
    """
    if codebook is None:
        raw = np.linalg.pinv(C) @ A_unit
        scale = np.abs(raw).max(axis=0)
        scale[scale == 0] = 1.0
        return np.clip(np.round(raw / scale), 0, 1).T
    proj = C @ codebook.T                          # (rows, n_candidates)
    norms = (proj ** 2).sum(axis=0)
    norms[norms == 0] = 1.0                        # the all-zero candidate scores 0
    score = (A_unit.T @ proj) ** 2 / norms[None, :]
    return codebook[np.argmax(score, axis=1), :].astype(float)


def factorize_binary(
    A: np.ndarray,
    T: int,
    topo: Topology,
    pat: EstimationPattern,
    restarts: int = 30,
    iters: int = 60,
    seed: int = 0,
    exhaustive_limit: int = 14,
) -> tuple[np.ndarray, np.ndarray]:
    """Extract a binary pilot matrix X and real factor C from a completion.

    Works on column directions: each UE's column of A fixes only the ray
    its pilot combination must lie on. Alternates a closed-form fit of C
    with a per-UE binary assignment (exact enumeration for small T,
    rounding above exhaustive_limit); restarts re-seed C from random bases
    of the column space and from random column subsets. UEs outside the
    estimation pattern keep all-zero rows. A candidate X is accepted only
    when the feasibility oracle passes; if no restart verifies, raises
    FactorizationFailed rather than returning an unchecked assignment.
    """
    A = np.asarray(A, dtype=float)
    K = A.shape[1]
    if K != topo.K:
        raise ValueError("column count must match the number of UEs")
    rng = np.random.default_rng(seed)
    codebook = None
    if T <= exhaustive_limit:
        codebook = ((np.arange(2 ** T)[:, None] >> np.arange(T)[None, :]) & 1).astype(float)

    est_ues = sorted({k for k, _ in pat.edges})
    if not est_ues:
        return np.zeros((K, T)), np.zeros((A.shape[0], T))
    norms = np.linalg.norm(A[:, est_ues], axis=0)
    norms[norms == 0] = 1.0
    A_unit = A[:, est_ues] / norms

    u, _, _ = np.linalg.svd(A_unit, full_matrices=False)
    Q = u[:, :T]

    for attempt in range(restarts):
        if attempt == 0:
            C = Q.copy()
        elif attempt % 2 == 1 and len(est_ues) >= T:
            C = A_unit[:, rng.choice(len(est_ues), size=T, replace=False)]
        else:
            C = Q @ rng.standard_normal((T, T))
        X_fit = _binary_step(C, A_unit, codebook)
        for _ in range(iters):
            scales = np.einsum("rk,rk->k", A_unit, C @ X_fit.T)
            C = (A_unit * scales) @ X_fit @ np.linalg.pinv(X_fit.T @ X_fit)
            X_new = _binary_step(C, A_unit, codebook)
            if np.array_equal(X_new, X_fit):
                break
            X_fit = X_new
        X = np.zeros((K, T))
        X[est_ues, :] = X_fit
        ok, _ = verify_assignment(X, topo, pat)
        if ok:
            C_full = A @ X @ np.linalg.pinv(X.T @ X)
            return X, C_full
    raise FactorizationFailed(f"no verified binary factor found in {restarts} restarts")
