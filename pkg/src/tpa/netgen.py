"""Random network realizations: geometry, path loss, shadowing, large-scale fading."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimConfig",
    "NetworkRealization",
    "fixed_loss_db",
    "path_loss_db",
    "torus_distances",
    "generate_network",
    "normalized_snrs",
]


@dataclass(frozen=True)
class SimConfig:
    """Deployment and radio parameters for one simulated network.

    Distances are in km, heights in m, powers in mW, frequencies in MHz.
    tau_p is the number of samples reserved for uplink training, N_c the
    TDD frame length in samples.
    """

    M: int                          # number of RRHs
    K: int                          # number of UEs
    area_side_km: float = 1.0
    carrier_freq_mhz: float = 1900.0
    bandwidth_hz: float = 20e6
    rho_p_mw: float = 100.0         # UL pilot power per UE
    rho_d_mw: float = 200.0         # DL power per RRH
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    sigma_sh_db: float = 8.0        # shadow fading std, dB
    h_rrh_m: float = 15.0
    h_ue_m: float = 1.65
    d0_km: float = 0.01
    d1_km: float = 0.05
    tau_p: int = 20
    N_c: int = 200
    seed: int = 0
    freq_coeff_db: float = 33.9     # coefficient of log10(f) in the fixed-loss constant

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise ValueError("M and K must be positive")
        for name in ("area_side_km", "carrier_freq_mhz", "bandwidth_hz", "rho_p_mw",
                     "rho_d_mw", "h_rrh_m", "h_ue_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.sigma_sh_db < 0:
            raise ValueError("sigma_sh_db must be non-negative")
        if not (0 < self.d0_km < self.d1_km < self.area_side_km):
            raise ValueError("need 0 < d0_km < d1_km < area_side_km")
        if not (1 <= self.tau_p < self.N_c):
            raise ValueError("need 1 <= tau_p < N_c")

    @property
    def noise_power_dbm(self) -> float:
        """Effective noise power over the full bandwidth, dBm."""
        return self.noise_psd_dbm_hz + 10.0 * math.log10(self.bandwidth_hz) + self.noise_figure_db


@dataclass
class NetworkRealization:
    """One random drop: positions plus the K x M large-scale fading matrix (linear)."""

    rrh_xy: np.ndarray          # (M, 2) km
    ue_xy: np.ndarray           # (K, 2) km
    beta: np.ndarray            # (K, M), linear scale, beta[k, m] > 0
    noise_power_dbm: float
    seed: int

    def __post_init__(self):
        for arr in (self.rrh_xy, self.ue_xy, self.beta):
            arr.setflags(write=False)

    @property
    def K(self) -> int:
        return self.beta.shape[0]

    @property
    def M(self) -> int:
        return self.beta.shape[1]


def fixed_loss_db(cfg: SimConfig) -> float:
    """Fixed part L of the three-slope path loss model (dB).

    Hata-COST231 style constant combining carrier frequency and antenna
    heights; L = 46.3 + 33.9 log10(f) - 13.82 log10(h_rrh)
    - (1.1 log10(f) - 0.7) h_ue + (1.56 log10(f) - 0.8).
    """
    lf = math.log10(cfg.carrier_freq_mhz)
    return (46.3 + cfg.freq_coeff_db * lf
            - 13.82 * math.log10(cfg.h_rrh_m)
            - (1.1 * lf - 0.7) * cfg.h_ue_m
            + (1.56 * lf - 0.8))


def path_loss_db(d_km, cfg: SimConfig):
    """Three-slope path loss PL(d) in dB (negative value, i.e. a gain).

    Slopes: 20 dB/decade below d0, 15+20 split between d0 and d1, and
    35 dB/decade beyond d1. Continuous at both breakpoints; distances
    are evaluated in km.
    """
    d = np.asarray(d_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be strictly positive")
    L = fixed_loss_db(cfg)
    log_d1 = math.log10(cfg.d1_km)
    pl_inner = -L - 15.0 * log_d1 - 20.0 * math.log10(cfg.d0_km)
    pl = np.where(
        d <= cfg.d0_km,
        pl_inner,
        np.where(
            d <= cfg.d1_km,
            -L - 15.0 * log_d1 - 20.0 * np.log10(np.maximum(d, cfg.d0_km)),
            -L - 35.0 * np.log10(np.maximum(d, cfg.d1_km)),
        ),
    )
    if np.isscalar(d_km):
        return float(pl)
    return pl


def torus_distances(a_xy: np.ndarray, b_xy: np.ndarray, side: float) -> np.ndarray:
    """Pairwise wrap-around distances on a square torus of the given side."""
    delta = np.abs(a_xy[:, None, :] - b_xy[None, :, :])
    delta = np.minimum(delta, side - delta)
    return np.sqrt((delta ** 2).sum(axis=-1))


def generate_network(cfg: SimConfig) -> NetworkRealization:
    """Draw one network realization from cfg; a pure function of (cfg, cfg.seed).

    Draw order is fixed: RRH positions, then UE positions, then the
    K x M shadowing matrix, all from one PCG64 stream, so realizations
    are bit-reproducible across platforms.
    """
    rng = np.random.default_rng(cfg.seed)
    rrh_xy = rng.uniform(0.0, cfg.area_side_km, size=(cfg.M, 2))
    ue_xy = rng.uniform(0.0, cfg.area_side_km, size=(cfg.K, 2))
    shadow = rng.standard_normal(size=(cfg.K, cfg.M))

    d = torus_distances(ue_xy, rrh_xy, cfg.area_side_km)
    # co-located points have measure zero; clamp so the dB formula stays defined
    d = np.maximum(d, 1e-12)
    pl = path_loss_db(d, cfg)
    beta = 10.0 ** ((pl + cfg.sigma_sh_db * shadow) / 10.0)
    return NetworkRealization(
        rrh_xy=rrh_xy,
        ue_xy=ue_xy,
        beta=beta,
        noise_power_dbm=cfg.noise_power_dbm,
        seed=cfg.seed,
    )


def normalized_snrs(net: NetworkRealization, cfg: SimConfig) -> tuple[float, float]:
    """Pilot and data powers normalized by the noise power (dimensionless)."""
    rho_p_dbm = 10.0 * math.log10(cfg.rho_p_mw)
    rho_d_dbm = 10.0 * math.log10(cfg.rho_d_mw)
    rho_p = 10.0 ** ((rho_p_dbm - net.noise_power_dbm) / 10.0)
    rho_d = 10.0 ** ((rho_d_dbm - net.noise_power_dbm) / 10.0)
    return rho_p, rho_d
