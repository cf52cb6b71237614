import math

import numpy as np
import pytest

from tpa.netgen import (
    SimConfig,
    fixed_loss_db,
    generate_network,
    normalized_snrs,
    path_loss_db,
    torus_distances,
)


def default_cfg(**overrides):
    params = dict(M=10, K=5, seed=0)
    params.update(overrides)
    return SimConfig(**params)


def test_fixed_loss_reference_value():
    cfg = default_cfg()
    # independent evaluation of the published constant at 1900 MHz, 15 m, 1.65 m
    lf = math.log10(1900.0)
    expected = (46.3 + 33.9 * lf - 13.82 * math.log10(15.0)
                - (1.1 * lf - 0.7) * 1.65 + (1.56 * lf - 0.8))
    assert fixed_loss_db(cfg) == pytest.approx(expected, abs=1e-12)
    assert fixed_loss_db(cfg) == pytest.approx(140.71, abs=0.01)


def test_third_slope_at_one_km():
    cfg = default_cfg()
    assert path_loss_db(1.0, cfg) == pytest.approx(-fixed_loss_db(cfg), abs=1e-12)


def test_continuity_at_breakpoints():
    cfg = default_cfg()
    for d in (cfg.d0_km, cfg.d1_km):
        below = path_loss_db(d * (1 - 1e-13), cfg)
        above = path_loss_db(d * (1 + 1e-13), cfg)
        assert abs(below - above) < 1e-9
    # the two formulas agree exactly at d1
    L = fixed_loss_db(cfg)
    second = -L - 15 * math.log10(cfg.d1_km) - 20 * math.log10(cfg.d1_km)
    third = -L - 35 * math.log10(cfg.d1_km)
    assert abs(second - third) < 1e-9


def test_monotone_non_increasing():
    cfg = default_cfg()
    d = np.linspace(1e-4, 2.0, 4000)
    pl = path_loss_db(d, cfg)
    assert np.all(np.diff(pl) <= 1e-12)


def test_rejects_non_positive_distance():
    cfg = default_cfg()
    with pytest.raises(ValueError):
        path_loss_db(0.0, cfg)
    with pytest.raises(ValueError):
        path_loss_db(np.array([0.1, -1.0]), cfg)


def test_noise_power():
    cfg = default_cfg()
    assert cfg.noise_power_dbm == pytest.approx(-91.99, abs=0.01)
    assert cfg.noise_power_dbm == pytest.approx(-174 + 10 * math.log10(20e6) + 9, abs=1e-12)


def test_torus_distance_bound_and_symmetry():
    rng = np.random.default_rng(1)
    a = rng.uniform(0, 1, (40, 2))
    b = rng.uniform(0, 1, (30, 2))
    d = torus_distances(a, b, 1.0)
    assert d.max() <= math.sqrt(2) / 2 + 1e-12
    assert np.allclose(d, torus_distances(b, a, 1.0).T)


def test_generation_deterministic():
    cfg = default_cfg(seed=42)
    n1 = generate_network(cfg)
    n2 = generate_network(cfg)
    assert np.array_equal(n1.beta, n2.beta)
    assert np.array_equal(n1.rrh_xy, n2.rrh_xy)
    assert np.array_equal(n1.ue_xy, n2.ue_xy)


def test_zero_shadowing_depends_on_distance_only():
    cfg = default_cfg(sigma_sh_db=0.0, seed=7)
    net = generate_network(cfg)
    d = torus_distances(net.ue_xy, net.rrh_xy, cfg.area_side_km)
    expected = 10.0 ** (path_loss_db(np.maximum(d, 1e-12), cfg) / 10.0)
    assert np.allclose(net.beta, expected, rtol=1e-12)
    assert np.all(net.beta > 0)
    assert np.all(np.isfinite(net.beta))


def test_normalized_snrs():
    cfg = default_cfg()
    net = generate_network(cfg)
    rho_p, rho_d = normalized_snrs(net, cfg)
    assert rho_p == pytest.approx(10 ** ((20 - net.noise_power_dbm) / 10), rel=1e-12)
    assert rho_p == pytest.approx(1.58e11, rel=0.01)
    assert rho_d / rho_p == pytest.approx(2.0, rel=1e-12)


def test_power_equal_to_noise_normalizes_to_one():
    cfg = default_cfg()
    noise_mw = 10 ** (cfg.noise_power_dbm / 10)
    cfg2 = default_cfg(rho_p_mw=noise_mw)
    net = generate_network(cfg2)
    rho_p, _ = normalized_snrs(net, cfg2)
    assert rho_p == pytest.approx(1.0, rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        default_cfg(d0_km=0.06)          # breakpoints out of order
    with pytest.raises(ValueError):
        default_cfg(tau_p=0)
    with pytest.raises(ValueError):
        default_cfg(tau_p=200, N_c=200)  # training must fit inside the frame
    with pytest.raises(ValueError):
        default_cfg(bandwidth_hz=0.0)
