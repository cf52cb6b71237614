"""Uplink training, MMSE channel estimation, and Monte-Carlo downlink rates.

Channels g[m, k] = sqrt(beta[k, m]) h[m, k] with circular complex normal h.
Training correlator outputs feed a per-link linear MMSE estimator over the
pilot columns the UE actually transmits, which reduces to the classic
single-pilot formula when the pilot row has one non-zero. Downlink uses
conjugate beamforming with per-RRH equal power split across served UEs and
a global full-power normalization; rates average the log-SINR over fresh
channel and pilot-noise draws and carry the training-overhead prefactor.
All powers are normalized so the noise power is one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .netgen import NetworkRealization, SimConfig, normalized_snrs
from .topo import PilotAssignment, Topology

__all__ = [
    "ChannelRealization",
    "TrainingOutcome",
    "RateResult",
    "draw_channel",
    "overhead_prefactor",
    "pilot_power",
    "serving_mask",
    "estimator_coefficients",
    "train",
    "power_allocation",
    "downlink_rate",
]


@dataclass
class ChannelRealization:
    """One i.i.d. small-scale fading draw for every link."""

    g: np.ndarray   # (M, K) complex


@dataclass
class TrainingOutcome:
    eta_p: float
    ghat: np.ndarray    # (M, K) complex, zero where not estimated
    gamma: np.ndarray   # (M, K) mean-square estimate magnitude
    mse: np.ndarray     # (M, K)


@dataclass
class RateResult:
    per_user_rate: np.ndarray   # (K,) bits/s/Hz
    sum_rate: float
    prefactor: float
    n_trials: int
    seed: int


def draw_channel(net: NetworkRealization, rng: np.random.Generator) -> ChannelRealization:
    M, K = net.M, net.K
    h = (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) / math.sqrt(2.0)
    return ChannelRealization(g=np.sqrt(net.beta.T) * h)


def overhead_prefactor(T: int, N_c: int) -> float:
    """Training-overhead factor 1 - T/N_c, clamped at zero."""
    return max(0.0, 1.0 - T / N_c)


def pilot_power(X: np.ndarray, rho_p: float) -> float:
    """Equal pilot power coefficient eta_p = K rho_p / ||X||_F^2.

    For binary X the denominator is the number of pilot uses; for real X it
    is the total squared pilot gain, which keeps the per-UE average power
    budget tight in both cases.
    """
    X = np.asarray(X, dtype=float)
    denom = float(np.sum(X * X))
    if denom <= 0:
        raise ValueError("assignment transmits no pilots")
    return X.shape[0] * rho_p / denom


def serving_mask(
    assignment: PilotAssignment,
    topo: Topology | None = None,
    policy: str = "uncontaminated",
) -> np.ndarray:
    """Resolve which (rrh, ue) channels are estimated and served, as (M, K) bool.

    Assignments that carry serving sets are taken at face value. For
    single-pilot schemes without serving sets the policy decides:
    "uncontaminated" serves a connected UE only where no other connected UE
    shares its pilot, "all-connected" serves every connected UE.
    """
    active_row = np.abs(assignment.X).sum(axis=1) > 0
    if assignment.serving is not None:
        M = len(assignment.serving)
        mask = np.zeros((M, assignment.K), dtype=bool)
        for m, ues in enumerate(assignment.serving):
            for k in ues:
                mask[m, k] = True
        return mask & active_row[None, :]
    if topo is None:
        raise ValueError("assignment has no serving sets; a topology is required")
    nz_per_row = (np.abs(assignment.X) > 0).sum(axis=1)
    if np.any(nz_per_row[active_row] > 1):
        raise ValueError("policy-based serving is defined for single-pilot schemes only")
    if policy == "all-connected":
        return topo.adj.T & active_row[None, :]
    if policy != "uncontaminated":
        raise ValueError(f"unknown serving policy: {policy!r}")
    pilot = np.argmax(np.abs(assignment.X) > 0, axis=1)   # (K,)
    mask = np.zeros((topo.M, topo.K), dtype=bool)
    for m in range(topo.M):
        connected = [k for k in topo.ues_of_rrh(m) if active_row[k]]
        for k in connected:
            clash = any(kk != k and pilot[kk] == pilot[k] for kk in connected)
            if not clash:
                mask[m, k] = True
    return mask


def estimator_coefficients(
    X: np.ndarray,
    beta: np.ndarray,
    serving: np.ndarray,
    tau_p: int,
    eta_p: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-link LMMSE combining weights and the closed-form gamma / MSE.

    For a served link (m, k), the estimate combines the correlator outputs
    of the pilot columns UE k transmits; the weights solve the T_k x T_k
    correlation system, which the unit noise keeps non-singular. Unserved
    links get gamma = 0 and mse = beta.
    """
    X = np.asarray(X, dtype=float)
    K, T = X.shape
    M = beta.shape[1]
    te = tau_p * eta_p
    W = np.zeros((M, K, T))
    gamma = np.zeros((M, K))
    mse = beta.T.copy()
    for m in range(M):
        sigma_m = np.eye(T) + te * (X.T * beta[:, m]) @ X
        for k in np.flatnonzero(serving[m, :]):
            idx = np.flatnonzero(X[k, :])
            if idx.size == 0:
                continue
            c = math.sqrt(te) * beta[k, m] * X[k, idx]
            w = np.linalg.solve(sigma_m[np.ix_(idx, idx)], c)
            W[m, k, idx] = w
            g = float(c @ w)
            gamma[m, k] = g
            mse[m, k] = beta[k, m] - g
    return W, gamma, mse


def _simulate_ghat(g_batch, X, W, te, rng):
    """Correlator outputs and estimates for a batch of channel draws."""
    n, M, K = g_batch.shape
    T = X.shape[1]
    noise = (rng.standard_normal((n, M, T)) + 1j * rng.standard_normal((n, M, T)))
    noise /= math.sqrt(2.0)
    rhat = math.sqrt(te) * np.einsum("nmk,kt->nmt", g_batch, X) + noise
    return np.einsum("mkt,nmt->nmk", W, rhat)


def train(
    assignment: PilotAssignment,
    net: NetworkRealization,
    chan: ChannelRealization,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
    topo: Topology | None = None,
    policy: str = "uncontaminated",
) -> TrainingOutcome:
    """Simulate one uplink training phase and estimate the served channels."""
    if chan.g.shape != (net.M, net.K):
        raise ValueError("channel realization shape mismatch")
    if assignment.T > cfg.tau_p:
        raise ValueError("pilot dimension exceeds the reserved training length tau_p")
    rng = rng if rng is not None else np.random.default_rng(0)
    rho_p, _ = normalized_snrs(net, cfg)
    eta_p = pilot_power(assignment.X, rho_p)
    mask = serving_mask(assignment, topo, policy)
    te = cfg.tau_p * eta_p
    W, gamma, mse = estimator_coefficients(assignment.X, net.beta, mask, cfg.tau_p, eta_p)
    ghat = _simulate_ghat(chan.g[None, :, :], assignment.X, W, te, rng)[0]
    ghat = np.where(mask, ghat, 0.0)
    return TrainingOutcome(eta_p=eta_p, ghat=ghat, gamma=gamma, mse=mse)


def empirical_mse(
    assignment: PilotAssignment,
    net: NetworkRealization,
    cfg: SimConfig,
    n_trials: int,
    seed: int,
    topo: Topology | None = None,
    policy: str = "uncontaminated",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Monte-Carlo estimation error statistics against the closed form.

    Returns (mean, standard_error, closed_form) of |g - ghat|^2 per link,
    all (M, K); unserved links compare the raw channel against a zero
    estimate, matching the closed form's beta there.
    """
    if n_trials < 2:
        raise ValueError("need at least two trials for a standard error")
    rho_p, _ = normalized_snrs(net, cfg)
    eta_p = pilot_power(assignment.X, rho_p)
    mask = serving_mask(assignment, topo, policy)
    te = cfg.tau_p * eta_p
    W, _, mse = estimator_coefficients(assignment.X, net.beta, mask, cfg.tau_p, eta_p)
    rng = np.random.default_rng(seed)
    M, K = net.M, net.K
    h = (rng.standard_normal((n_trials, M, K)) + 1j * rng.standard_normal((n_trials, M, K)))
    g = np.sqrt(net.beta.T)[None, :, :] * h / math.sqrt(2.0)
    ghat = _simulate_ghat(g, assignment.X, W, te, rng)
    ghat = np.where(mask[None, :, :], ghat, 0.0)
    err2 = np.abs(g - ghat) ** 2
    mean = err2.mean(axis=0)
    se = err2.std(axis=0, ddof=1) / math.sqrt(n_trials)
    return mean, se, mse


def power_allocation(gamma: np.ndarray, serving: np.ndarray, M: int,
                     mode: str = "proportional") -> np.ndarray:
    """Full-power coefficients eta[m, k] for the served links.

    "proportional" uses one coefficient per RRH (the cell-free full-power
    rule), so each served UE receives power in proportion to its estimate
    quality gamma. "equal-share" instead gives every served UE at an RRH
    the same power share, eta proportional to 1 / (|served| * gamma). One
    global constant then makes the average per-RRH power constraint tight.
    """
    if np.any(gamma < 0):
        raise ValueError("gamma must be non-negative")
    eta = np.zeros_like(gamma)
    ok = serving & (gamma > 0)
    rows, cols = np.nonzero(ok)
    if mode == "proportional":
        row_gamma = np.where(ok, gamma, 0.0).sum(axis=1)
        eta[rows, cols] = 1.0 / row_gamma[rows]
    elif mode == "equal-share":
        counts = serving.sum(axis=1)
        eta[rows, cols] = 1.0 / (counts[rows] * gamma[rows, cols])
    else:
        raise ValueError(f"unknown power allocation mode: {mode!r}")
    scale = float(np.sum(eta * gamma))
    if scale > 0:
        eta *= M / scale
    return eta


def downlink_rate(
    assignment: PilotAssignment,
    net: NetworkRealization,
    cfg: SimConfig,
    n_trials: int,
    seed: int,
    topo: Topology | None = None,
    policy: str = "uncontaminated",
    power_mode: str = "proportional",
) -> RateResult:
    """Monte-Carlo ergodic downlink rates under conjugate beamforming.

    Every trial draws fresh small-scale fading and fresh pilot noise, runs
    the training chain, forms the effective interference-channel gains, and
    accumulates log2(1 + SINR); receivers are assumed to know those gains.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if assignment.T > cfg.tau_p:
        raise ValueError("pilot dimension exceeds the reserved training length tau_p")
    prefactor = overhead_prefactor(assignment.T, cfg.N_c)
    rho_p, rho_d = normalized_snrs(net, cfg)
    eta_p = pilot_power(assignment.X, rho_p)
    mask = serving_mask(assignment, topo, policy)
    te = cfg.tau_p * eta_p
    W, gamma, _ = estimator_coefficients(assignment.X, net.beta, mask, cfg.tau_p, eta_p)
    eta = power_allocation(gamma, mask, net.M, mode=power_mode)
    amp = np.where(mask, np.sqrt(rho_d * eta), 0.0)

    rng = np.random.default_rng(seed)
    M, K = net.M, net.K
    chunk = max(1, min(n_trials, int(2e6 / (M * K)) or 1))
    done = 0
    per_trial_means = []
    while done < n_trials:
        n = min(chunk, n_trials - done)
        h = (rng.standard_normal((n, M, K)) + 1j * rng.standard_normal((n, M, K)))
        g_batch = np.sqrt(net.beta.T)[None, :, :] * h / math.sqrt(2.0)
        ghat = _simulate_ghat(g_batch, assignment.X, W, te, rng)
        ghat = np.where(mask[None, :, :], ghat, 0.0)
        f = np.einsum("nmk,nml->nkl", g_batch, amp[None, :, :] * np.conj(ghat))
        power = np.abs(f) ** 2
        sig = np.einsum("nkk->nk", power)
        interf = power.sum(axis=2) - sig
        sinr = sig / (1.0 + interf)
        per_trial_means.append(np.log2(1.0 + sinr).sum(axis=0))
        done += n
    log_sum = np.sum(per_trial_means, axis=0)
    rates = prefactor * log_sum / n_trials
    return RateResult(
        per_user_rate=rates,
        sum_rate=float(rates.sum()),
        prefactor=prefactor,
        n_trials=n_trials,
        seed=seed,
    )
