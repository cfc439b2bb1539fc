"""Geometry, pathloss, channel statistics, decode order, composite gains."""

import math

import numpy as np
import pytest

from irsmec import (ConfigError, DimensionError, DomainError, SystemConfig,
                    composite_gain, dbm_to_watt, displace_ues,
                    generate_channels, pathloss_gain, sic_order,
                    w_bar_from_phases, without_irs)
from irsmec.channel import _dist

from conftest import fixed_real, tiny_cfg


def test_dbm_conversions():
    assert abs(dbm_to_watt(31.0) - 1.2589) <= 1e-4 * 1.2589
    assert abs(dbm_to_watt(23.0) - 0.19953) <= 1e-4 * 0.19953
    assert abs(dbm_to_watt(-105.0) - 3.1623e-14) <= 1e-4 * 3.1623e-14
    assert dbm_to_watt(30.0) == pytest.approx(1.0)
    assert dbm_to_watt(0.0) == pytest.approx(1e-3)


def test_pathloss_reference_distance():
    # at 1 m the gain equals the reference regardless of exponent
    for c in (2.0, 3.5, 5.0):
        assert pathloss_gain(1.0, c, 1e-3) == pytest.approx(1e-3)


def test_pathloss_powerlaw_value():
    assert pathloss_gain(10.0, 2.0, 1e-3) == pytest.approx(1e-5)


def test_pathloss_default_geometry_user_to_surface():
    # second default user (5, 50, 10) to the surface (0, 50, 2): d^2 = 89
    cfg = SystemConfig()
    d = _dist(cfg.ue_pos[1], cfg.irs_pos)
    assert d == pytest.approx(math.sqrt(89.0))
    g = pathloss_gain(d, cfg.exp_irs_ue, cfg.ref_gain)
    assert g == pytest.approx(1e-3 / 89.0)
    assert abs(g - 1.1236e-5) <= 1e-4 * 1.1236e-5


def test_pathloss_rejects_nonpositive_distance():
    with pytest.raises(DomainError):
        pathloss_gain(0.0, 2.0, 1e-3)
    with pytest.raises(DomainError):
        pathloss_gain(-1.0, 2.0, 1e-3)


def test_config_validate_returns_self_and_budget():
    cfg = SystemConfig().validate()
    assert cfg.power_budget_w == pytest.approx(dbm_to_watt(31.0) - dbm_to_watt(23.0))


def test_config_validate_collects_all_problems():
    bad = SystemConfig(num_users=0, bandwidth_hz=-1.0)
    with pytest.raises(ConfigError) as err:
        bad.validate()
    msg = str(err.value)
    assert "num_users" in msg and "bandwidth_hz" in msg


def test_config_rejects_position_count_mismatch():
    with pytest.raises(ConfigError):
        SystemConfig(num_users=3).validate()


def test_generated_entry_power_matches_pathloss():
    # i.i.d. entries: estimate per-entry power from wide matrices in one draw
    cfg_a = SystemConfig(num_antennas=50000, num_elements=0).validate()
    real_a = generate_channels(cfg_a, 0)
    for k in range(2):
        g = pathloss_gain(_dist(cfg_a.ue_pos[k], cfg_a.ap_pos), cfg_a.exp_ap_ue,
                          cfg_a.ref_gain)
        est = np.mean(np.abs(real_a.h_direct[k]) ** 2)
        assert abs(est - g) <= 0.05 * g

    cfg_b = SystemConfig(num_antennas=1, num_elements=50000).validate()
    real_b = generate_channels(cfg_b, 0)
    for k in range(2):
        g = pathloss_gain(_dist(cfg_b.ue_pos[k], cfg_b.irs_pos), cfg_b.exp_irs_ue,
                          cfg_b.ref_gain)
        est = np.mean(np.abs(real_b.h_ue_irs[k]) ** 2)
        assert abs(est - g) <= 0.05 * g
    g = pathloss_gain(_dist(cfg_b.irs_pos, cfg_b.ap_pos), cfg_b.exp_ap_irs,
                      cfg_b.ref_gain)
    est = np.mean(np.abs(real_b.h_irs_ap) ** 2)
    assert abs(est - g) <= 0.05 * g


def test_generation_deterministic_per_seed():
    cfg = tiny_cfg()
    a = generate_channels(cfg, 3)
    b = generate_channels(cfg, 3)
    c = generate_channels(cfg, 4)
    assert np.array_equal(a.h_direct, b.h_direct)
    assert np.array_equal(a.h_irs_ap, b.h_irs_ap)
    assert not np.array_equal(a.h_direct, c.h_direct)


def test_cascade_matches_entrywise_definition():
    cfg = tiny_cfg()
    real = generate_channels(cfg, 1)
    for k in range(real.num_users):
        oracle = np.diag(np.conj(real.h_ue_irs[k])) @ real.h_irs_ap
        assert np.allclose(real.h_cascade[k], oracle, atol=1e-15)
        assert np.allclose(real.h_composite[k, :-1], real.h_cascade[k])
        assert np.allclose(real.h_composite[k, -1], np.conj(real.h_direct[k]))


def test_cascade_scalar_case():
    real = fixed_real([[2.0]], [[1.0 + 1.0j]], [[3.0j]])
    assert real.h_cascade[0, 0, 0] == pytest.approx((1.0 - 1.0j) * 3.0j)


def test_sic_order_weakest_first():
    real = fixed_real([[3.0, 0.0], [1.0, 0.0]], np.zeros((2, 0)), np.zeros((0, 2)))
    assert list(sic_order(real)) == [1, 0]


def test_sic_order_tie_breaks_by_index():
    real = fixed_real([[1.0, 0.0], [0.0, 1.0]], np.zeros((2, 0)), np.zeros((0, 2)))
    assert list(sic_order(real)) == [0, 1]


def test_sic_order_matches_identity_pattern_oracle():
    cfg = tiny_cfg(num_users=3, ue_pos=((5.0, 75.0, 5.0), (5.0, 50.0, 10.0),
                                        (2.0, 60.0, 5.0)))
    real = generate_channels(cfg, 5)
    gains = np.linalg.norm(real.h_composite.sum(axis=1), axis=1)
    assert list(sic_order(real)) == list(np.argsort(gains, kind="stable"))


def test_composite_gain_direct_only():
    cfg = tiny_cfg(num_elements=0)
    real = generate_channels(cfg, 2)
    m = np.array([1.0, 1.0j]) / np.sqrt(2.0)
    got = composite_gain(real, 0, np.ones(1), m)
    assert got == pytest.approx(complex(np.conj(real.h_direct[0]) @ m))


def test_composite_gain_matches_physical_form():
    cfg = tiny_cfg()
    real = generate_channels(cfg, 6)
    rng = np.random.default_rng(0)
    theta = rng.uniform(0.0, 2.0 * np.pi, cfg.num_elements)
    m = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    m /= np.linalg.norm(m)
    w_bar = w_bar_from_phases(theta)
    for k in range(2):
        surface = np.conj(real.h_ue_irs[k]) * np.exp(1j * theta) @ real.h_irs_ap
        oracle = (np.conj(real.h_direct[k]) + surface) @ m
        assert composite_gain(real, k, w_bar, m) == pytest.approx(complex(oracle))


def test_composite_gain_global_phase_invariant():
    cfg = tiny_cfg()
    real = generate_channels(cfg, 7)
    m = np.array([0.6, 0.8], complex)
    w = w_bar_from_phases(np.linspace(0.1, 1.9, cfg.num_elements))
    base = abs(composite_gain(real, 0, w, m))
    rotated = abs(composite_gain(real, 0, w * np.exp(1j * 0.77), m))
    assert rotated == pytest.approx(base)


def test_composite_gain_shape_checks():
    cfg = tiny_cfg()
    real = generate_channels(cfg, 8)
    with pytest.raises(DimensionError):
        composite_gain(real, 0, np.ones(3), np.ones(2))
    with pytest.raises(DimensionError):
        composite_gain(real, 0, np.ones(5), np.ones(3))


def test_without_irs_zeroes_cascade_and_rescores_order():
    cfg = tiny_cfg()
    real = generate_channels(cfg, 9)
    bare = without_irs(real)
    assert np.all(bare.h_cascade == 0.0)
    m = np.ones(2) / np.sqrt(2.0)
    w = w_bar_from_phases(np.zeros(cfg.num_elements))
    got = composite_gain(bare, 1, w, m)
    assert got == pytest.approx(complex(np.conj(real.h_direct[1]) @ m))
    gains = np.linalg.norm(np.conj(bare.h_direct), axis=1)
    assert list(bare.sic_order) == list(np.argsort(gains, kind="stable"))


def test_displace_ues_moves_radially():
    cfg = SystemConfig()
    moved = displace_ues(cfg, 5.0)
    for before, after in zip(cfg.ue_pos, moved.ue_pos):
        d0 = _dist(before, cfg.irs_pos)
        d1 = _dist(after, cfg.irs_pos)
        assert d1 == pytest.approx(d0 + 5.0)
    assert np.allclose(displace_ues(cfg, 0.0).ue_pos, cfg.ue_pos)


def test_displace_ues_domain_errors():
    cfg = SystemConfig()
    with pytest.raises(DomainError):
        displace_ues(cfg, -1.0)
    on_surface = SystemConfig(ue_pos=((0.0, 50.0, 2.0), (5.0, 50.0, 10.0)))
    with pytest.raises(DomainError):
        displace_ues(on_surface, 1.0)
