"""Shared builders for the test suite. Small scenarios keep everything fast."""

import numpy as np
import pytest

from irsmec import SystemConfig, generate_channels, initialize
from irsmec.channel import _derive


def tiny_cfg(**over):
    """2 users, 2 antennas, 4 elements; mild iteration caps."""
    base = dict(num_antennas=2, num_elements=4, max_iters=8,
                num_candidates=50)
    base.update(over)
    return SystemConfig(**base).validate()


def fixed_real(h_direct, h_ue_irs, h_irs_ap):
    """Realization with hand-picked channel matrices."""
    return _derive(np.asarray(h_direct, complex),
                   np.asarray(h_ue_irs, complex),
                   np.asarray(h_irs_ap, complex))


def scalar_real(g):
    """Single user, single antenna, no surface: direct gain g."""
    return fixed_real([[g]], np.zeros((1, 0)), np.zeros((0, 1)))


def seeded_instance(seed=0, **over):
    """Config, realization, and a sensible starting allocation."""
    cfg = tiny_cfg(**over)
    real = generate_channels(cfg, seed)
    alloc, aux = initialize(real, cfg)
    return cfg, real, alloc, aux


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
