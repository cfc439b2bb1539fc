"""Rates, powers, efficiency, and the concave surrogate bound."""

import numpy as np
import pytest

from irsmec import (Allocation, AuxState, DomainError, RateContext,
                    SystemConfig, dinkelbach_objective, effective_gain,
                    energy_efficiency, gain_table, generate_channels,
                    lemma1_update, local_rate, log_sum_rate, offload_rate,
                    rate_slack, sinr, sum_power, sum_rate, surrogate_rate,
                    total_power)

from conftest import scalar_real, seeded_instance, tiny_cfg

UE3 = ((5.0, 75.0, 5.0), (5.0, 50.0, 10.0), (2.0, 60.0, 5.0))


def one_user_cfg(**over):
    base = dict(num_users=1, num_antennas=1, num_elements=0,
                ue_pos=((5.0, 75.0, 5.0),), noise_w=1.0)
    base.update(over)
    return SystemConfig(**base).validate()


def one_user_alloc(p, f=0.0):
    return Allocation(p=np.array([float(p)]), f=np.array([float(f)]),
                      beams=np.ones((1, 1), complex),
                      reflect=np.ones(1, complex))


def matched_t(real, alloc, cfg, ctx):
    v = gain_table(real, alloc)
    return np.array([1.0 / (1.0 + ctx.a * sum(alloc.p[i] * v[i]
                                              for i in ctx.preds[k]))
                     for k in range(real.num_users)])


def test_sinr_single_user_is_power_over_noise():
    cfg = one_user_cfg(noise_w=0.5)
    real = scalar_real(1.0)
    assert sinr(real, one_user_alloc(1.0), cfg, 0) == pytest.approx(2.0)
    assert sinr(real, one_user_alloc(0.0), cfg, 0) == 0.0


def test_sinr_matches_physical_oracle():
    cfg, real, alloc, _ = seeded_instance(11)
    rng = np.random.default_rng(3)
    alloc.p = rng.uniform(0.1, 0.4, 2)
    ctx = RateContext.noma(real, cfg)
    v = np.array([abs(np.conj(alloc.reflect) @ real.h_composite[k]
                      @ alloc.beams[k]) ** 2 for k in range(2)])
    order = list(real.sic_order)
    for pos, k in enumerate(order):
        interf = sum(alloc.p[i] * v[i] for i in order[:pos])
        oracle = ctx.a * alloc.p[k] * v[k] / (1.0 + ctx.a * interf)
        assert sinr(real, alloc, cfg, k) == pytest.approx(oracle, rel=1e-12)


def test_offload_rate_log2_values():
    cfg = one_user_cfg()
    real = scalar_real(1.0)
    assert offload_rate(real, one_user_alloc(1.0), cfg, 0) == pytest.approx(1e6)
    assert offload_rate(real, one_user_alloc(3.0), cfg, 0) == pytest.approx(2e6)
    assert offload_rate(real, one_user_alloc(0.0), cfg, 0) == 0.0


def test_local_rate_cycles_per_bit():
    cfg = one_user_cfg()
    assert local_rate(one_user_alloc(0.0, f=1e9), cfg, 0) == pytest.approx(1e6)
    assert local_rate(one_user_alloc(0.0, f=0.0), cfg, 0) == 0.0


def test_total_power_components():
    cfg = one_user_cfg()
    assert total_power(one_user_alloc(0.0), cfg, 0) == pytest.approx(0.19953, rel=1e-4)
    idle = total_power(one_user_alloc(0.0), cfg, 0)
    cpu = total_power(one_user_alloc(0.0, f=1e9), cfg, 0)
    assert cpu - idle == pytest.approx(0.1)
    assert total_power(one_user_alloc(0.5, f=1e9), cfg, 0) == pytest.approx(
        0.79953, rel=1e-4)


def test_total_power_transmit_weight():
    cfg = one_user_cfg(tx_power_weight=2.5)
    base = total_power(one_user_alloc(0.0), cfg, 0)
    assert total_power(one_user_alloc(0.4), cfg, 0) - base == pytest.approx(1.0)


def test_energy_efficiency_composition():
    cfg, real, alloc, _ = seeded_instance(12)
    ee = energy_efficiency(real, alloc, cfg)
    assert ee == pytest.approx(sum_rate(real, alloc, cfg) / sum_power(alloc, cfg),
                               rel=1e-12)


def test_energy_efficiency_scales_with_bandwidth_when_all_offloaded():
    cfg, real, alloc, _ = seeded_instance(13)
    alloc.f = np.zeros(2)
    wide = tiny_cfg(bandwidth_hz=2e6)
    assert energy_efficiency(real, alloc, wide) == pytest.approx(
        2.0 * energy_efficiency(real, alloc, cfg), rel=1e-12)


def test_lemma_multiplier_values_and_domain():
    assert lemma1_update(1.0) == pytest.approx(1.0)
    assert lemma1_update(2.0) == pytest.approx(0.5)
    assert lemma1_update(np.e) == pytest.approx(1.0 / np.e)
    with pytest.raises(DomainError):
        lemma1_update(0.0)
    with pytest.raises(DomainError):
        lemma1_update(-3.0)


def test_lemma_bound_tight_at_update_and_below_elsewhere():
    rng = np.random.default_rng(4)
    for x in np.logspace(-3, 3, 61):
        t = lemma1_update(x)
        phi = -t * x + np.log(t) + 1.0
        assert abs(phi + np.log(x)) <= 1e-9 * max(1.0, abs(np.log(x)))
        other = t * np.exp(rng.uniform(0.1, 2.0) * rng.choice([-1.0, 1.0]))
        assert -other * x + np.log(other) + 1.0 < -np.log(x)


def test_surrogate_equals_rate_at_matched_multiplier():
    cfg, real, alloc, _ = seeded_instance(14)
    alloc.p = np.array([0.3, 0.2])
    ctx = RateContext.noma(real, cfg)
    aux = AuxState(t=matched_t(real, alloc, cfg, ctx), eta1=0.0)
    for k in range(2):
        target = offload_rate(real, alloc, cfg, k, ctx)
        got = surrogate_rate(real, alloc, cfg, aux, k, ctx)
        assert got == pytest.approx(target, rel=1e-9)


def test_surrogate_is_lower_bound_for_other_multipliers():
    cfg, real, alloc, _ = seeded_instance(15)
    alloc.p = np.array([0.25, 0.35])
    ctx = RateContext.noma(real, cfg)
    t0 = matched_t(real, alloc, cfg, ctx)
    for scale in (0.4, 0.9, 1.3, 3.0):
        aux = AuxState(t=t0 * scale, eta1=0.0)
        for k in range(2):
            assert (surrogate_rate(real, alloc, cfg, aux, k, ctx)
                    <= offload_rate(real, alloc, cfg, k, ctx) + 1e-9)


def test_surrogate_multiplier_grid_recovers_rate():
    cfg = one_user_cfg()
    real = scalar_real(1.0)
    alloc = one_user_alloc(2.0)
    target = offload_rate(real, alloc, cfg, 0)
    best = -np.inf
    for t in np.logspace(-3, 3, 4001):
        aux = AuxState(t=np.array([t]), eta1=0.0)
        best = max(best, surrogate_rate(real, alloc, cfg, aux, 0))
    assert best == pytest.approx(target, rel=1e-4)
    assert best <= target + 1e-9


def test_surrogate_rejects_nonpositive_multiplier():
    cfg = one_user_cfg()
    real = scalar_real(1.0)
    aux = AuxState(t=np.array([0.0]), eta1=0.0)
    with pytest.raises(DomainError):
        surrogate_rate(real, one_user_alloc(1.0), cfg, aux, 0)


def test_effective_gain_normalization():
    cfg, real, alloc, _ = seeded_instance(16)
    ctx = RateContext.noma(real, cfg)
    v = gain_table(real, alloc)
    for k in range(2):
        assert effective_gain(real, alloc, cfg, k) == pytest.approx(
            ctx.a * v[k], rel=1e-12)


def test_sum_offload_invariant_under_global_reflect_phase():
    cfg, real, alloc, _ = seeded_instance(17)
    before = [offload_rate(real, alloc, cfg, k) for k in range(2)]
    alloc.reflect = alloc.reflect * np.exp(1j * 1.234)
    after = [offload_rate(real, alloc, cfg, k) for k in range(2)]
    assert after == pytest.approx(before, rel=1e-12)


def test_offload_rate_monotone_in_own_power():
    cfg, real, alloc, _ = seeded_instance(18)
    for k in range(2):
        lo = offload_rate(real, alloc, cfg, k)
        bumped = alloc.copy()
        bumped.p[k] *= 1.5
        assert offload_rate(real, bumped, cfg, k) >= lo


def test_log_sum_rate_telescopes_to_per_user_sum():
    cfg = tiny_cfg(num_users=3, ue_pos=UE3)
    real = generate_channels(cfg, 19)
    rng = np.random.default_rng(5)
    alloc = Allocation(p=rng.uniform(0.05, 0.5, 3), f=rng.uniform(0.0, 5e8, 3),
                       beams=np.ones((3, 2), complex) / np.sqrt(2.0),
                       reflect=np.exp(1j * rng.uniform(0, 2 * np.pi, 5)))
    assert log_sum_rate(real, alloc, cfg) == pytest.approx(
        sum_rate(real, alloc, cfg), rel=1e-9)
    oma = RateContext.oma(real, cfg)
    assert log_sum_rate(real, alloc, cfg, oma) == pytest.approx(
        sum_rate(real, alloc, cfg, oma), rel=1e-9)


def test_dinkelbach_objective_identity():
    cfg, real, alloc, aux = seeded_instance(20)
    aux.eta1 = 3.3e6
    expect = log_sum_rate(real, alloc, cfg) - aux.eta1 * sum_power(alloc, cfg)
    assert dinkelbach_objective(real, alloc, cfg, aux) == pytest.approx(
        expect, rel=1e-12)


def test_rate_slack_reports_worst_user():
    cfg, real, alloc, _ = seeded_instance(21)
    slacks = [offload_rate(real, alloc, cfg, k) + local_rate(alloc, cfg, k)
              - cfg.rate_min_bps for k in range(2)]
    assert rate_slack(real, alloc, cfg) == pytest.approx(min(slacks), rel=1e-12)
    tight = tiny_cfg(rate_min_bps=1e12)
    assert rate_slack(real, alloc, tight) < 0.0


def test_shared_band_context_structure():
    cfg, real, _, _ = seeded_instance(22)
    ctx = RateContext.noma(real, cfg)
    order = list(real.sic_order)
    for pos, k in enumerate(order):
        assert list(ctx.preds[k]) == order[:pos]
    assert np.all(ctx.user_bw == cfg.bandwidth_hz)
    assert ctx.groups == ((cfg.bandwidth_hz, (0, 1)),)
    assert ctx.a == pytest.approx(1.0 / cfg.noise_w)


def test_orthogonal_context_structure():
    cfg, real, _, _ = seeded_instance(23)
    ctx = RateContext.oma(real, cfg)
    assert ctx.a == pytest.approx(2.0 / cfg.noise_w)
    assert np.all(ctx.user_bw == cfg.bandwidth_hz / 2.0)
    assert all(p == () for p in ctx.preds)
    assert ctx.groups == ((cfg.bandwidth_hz / 2.0, (0,)),
                          (cfg.bandwidth_hz / 2.0, (1,)))
