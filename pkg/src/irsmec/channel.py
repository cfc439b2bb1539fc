"""System geometry, large-scale pathloss, and fading channel generation.

Scenario: K single-antenna users offload computation over a NOMA uplink to an
N-antenna access point, assisted by an M-element reflecting surface. Every
link follows sqrt(G0 d^-c) * g with g ~ CN(0,1) i.i.d. per element/antenna.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DimensionError, DomainError
from .numerics import SeedStreams

__all__ = [
    "ChannelRealization",
    "SystemConfig",
    "composite_gain",
    "dbm_to_watt",
    "displace_ues",
    "generate_channels",
    "pathloss_gain",
    "sic_order",
    "w_bar_from_phases",
    "without_irs",
]


def dbm_to_watt(x_dbm):
    """Convert dBm to watts (done once, at config time)."""
    return 10.0 ** (x_dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters. Defaults reproduce the evaluation setup.

    Power figures are stored in watts (31 dBm cap, 23 dBm circuit draw,
    -105 dBm noise); the antenna/element counts are free parameters.
    """

    num_users: int = 2
    num_antennas: int = 4            # AP receive antennas
    num_elements: int = 16           # reflecting elements (0 = surface absent)
    ap_pos: tuple = (5.0, 0.0, 20.0)
    irs_pos: tuple = (0.0, 50.0, 2.0)
    ue_pos: tuple = ((5.0, 75.0, 5.0), (5.0, 50.0, 10.0))
    bandwidth_hz: float = 1.0e6
    noise_w: float = dbm_to_watt(-105.0)
    ref_gain: float = 1.0e-3         # pathloss at 1 m (-30 dB)
    exp_ap_ue: float = 5.0
    exp_ap_irs: float = 3.5
    exp_irs_ue: float = 2.0
    power_cap_w: float = dbm_to_watt(31.0)    # per-user total power cap
    circuit_w: float = dbm_to_watt(23.0)      # constant circuit power per user
    cycles_per_bit: float = 1.0e3
    cpu_kappa: float = 1.0e-28       # effective switched capacitance
    tx_power_weight: float = 1.0     # amplifier inefficiency on transmit power
    rate_min_bps: float = 1.0e6      # per-user rate requirement
    conv_tol: float = 1.0e-3         # relative EE change stopping threshold
    max_iters: int = 30              # outer iteration cap
    num_candidates: int = 200        # Gaussian randomization pool size

    def validate(self):
        """Raise ConfigError listing every violated invariant."""
        problems = []
        if self.num_users < 1:
            problems.append("num_users must be >= 1")
        if self.num_antennas < 1:
            problems.append("num_antennas must be >= 1")
        if self.num_elements < 0:
            problems.append("num_elements must be >= 0")
        if len(self.ue_pos) != self.num_users:
            problems.append(f"ue_pos has {len(self.ue_pos)} entries, expected {self.num_users}")
        for name in ("bandwidth_hz", "noise_w", "ref_gain", "cycles_per_bit", "cpu_kappa"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be > 0")
        for name in ("exp_ap_ue", "exp_ap_irs", "exp_irs_ue"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be > 0")
        if self.power_cap_w <= self.circuit_w:
            problems.append("power_cap_w must exceed circuit_w (no budget left to transmit)")
        if self.tx_power_weight <= 0:
            problems.append("tx_power_weight must be > 0")
        if self.rate_min_bps < 0:
            problems.append("rate_min_bps must be >= 0")
        if not 0.0 < self.conv_tol <= 1.0:
            problems.append("conv_tol must lie in (0, 1]")
        if self.max_iters < 1:
            problems.append("max_iters must be >= 1")
        if self.num_candidates < 0:
            problems.append("num_candidates must be >= 0")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    @property
    def power_budget_w(self):
        """Cap left for transmit power plus CPU power after the circuit draw."""
        return self.power_cap_w - self.circuit_w


def pathloss_gain(distance, exponent, ref_gain):
    """Large-scale power gain G0 * d^-c."""
    if distance <= 0:
        raise DomainError(f"distance must be > 0, got {distance}")
    return ref_gain * distance ** (-exponent)


def _dist(a, b):
    return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw plus everything derived from it.

    h_cascade[k] = diag(h_ue_irs[k]ᴴ) @ h_irs_ap, so a reflect pattern applied
    on the left as a row vector of unit-modulus coefficients reproduces the
    surface-adjusted uplink. h_composite[k] stacks the cascade rows on top of
    h_direct[k]ᴴ, giving the (M+1) x N matrix the lifted reflect vector acts on.
    """

    h_direct: np.ndarray    # (K, N) user -> AP
    h_ue_irs: np.ndarray    # (K, M) user -> surface
    h_irs_ap: np.ndarray    # (M, N) surface -> AP, shared by all users
    h_cascade: np.ndarray   # (K, M, N)
    h_composite: np.ndarray  # (K, M+1, N)
    sic_order: np.ndarray   # decode bookkeeping: weakest composite gain first

    @property
    def num_users(self):
        return self.h_direct.shape[0]

    @property
    def num_antennas(self):
        return self.h_direct.shape[1]

    @property
    def num_elements(self):
        return self.h_ue_irs.shape[1]


def _derive(h_direct, h_ue_irs, h_irs_ap):
    k_users, n_ant = h_direct.shape
    m_el = h_ue_irs.shape[1]
    cascade = np.conj(h_ue_irs)[:, :, None] * h_irs_ap[None, :, :]
    composite = np.empty((k_users, m_el + 1, n_ant), dtype=complex)
    composite[:, :m_el, :] = cascade
    composite[:, m_el, :] = np.conj(h_direct)
    # identity reflect pattern: row sums of the composite matrix
    gains = np.linalg.norm(composite.sum(axis=1), axis=1)
    order = np.argsort(gains, kind="stable")
    return ChannelRealization(h_direct, h_ue_irs, h_irs_ap, cascade, composite, order)


def generate_channels(cfg, streams):
    """Draw one i.i.d. Rayleigh realization of all links from the fading stream.

    streams may be a SeedStreams instance or a bare integer seed. The same
    seed always yields the same realization.
    """
    if isinstance(streams, (int, np.integer)):
        streams = SeedStreams(streams)
    rng = streams.stream("fading")
    k, n, m = cfg.num_users, cfg.num_antennas, cfg.num_elements

    def cgauss(shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

    g_direct = np.array([pathloss_gain(_dist(u, cfg.ap_pos), cfg.exp_ap_ue, cfg.ref_gain)
                         for u in cfg.ue_pos])
    g_ue_irs = np.array([pathloss_gain(_dist(u, cfg.irs_pos), cfg.exp_irs_ue, cfg.ref_gain)
                         for u in cfg.ue_pos])
    g_irs_ap = pathloss_gain(_dist(cfg.irs_pos, cfg.ap_pos), cfg.exp_ap_irs, cfg.ref_gain)

    h_direct = np.sqrt(g_direct)[:, None] * cgauss((k, n))
    h_ue_irs = np.sqrt(g_ue_irs)[:, None] * cgauss((k, m))
    h_irs_ap = np.sqrt(g_irs_ap) * cgauss((m, n))
    return _derive(h_direct, h_ue_irs, h_irs_ap)


def sic_order(real):
    """Users sorted by composite gain under an identity reflect pattern.

    Weakest first. Decoding runs strongest to weakest, so the weakest user
    is decoded last over a clean channel and every other user sees residual
    interference from the weaker users listed before it. Ties break toward
    the lower user index.
    """
    return real.sic_order.copy()


def composite_gain(real, k, w_bar, m_vec):
    """Effective complex channel w_barᴴ · h_composite[k] · m_vec.

    w_bar is the lifted reflect vector of length M+1 (last entry the direct
    path's reference coefficient); m_vec is the AP combining vector. When
    w_bar = w_bar_from_phases(theta), this equals the physical
    (h_directᴴ + h_ue_irsᴴ diag(e^{jθ}) h_irs_ap) m_vec.
    """
    w_bar = np.asarray(w_bar, dtype=complex)
    m_vec = np.asarray(m_vec, dtype=complex)
    comp = real.h_composite[k]
    if w_bar.shape != (comp.shape[0],):
        raise DimensionError(f"w_bar has shape {w_bar.shape}, expected ({comp.shape[0]},)")
    if m_vec.shape != (comp.shape[1],):
        raise DimensionError(f"m_vec has shape {m_vec.shape}, expected ({comp.shape[1]},)")
    return complex(np.conj(w_bar) @ comp @ m_vec)


def w_bar_from_phases(theta):
    """Lift per-element phase shifts into the length-(M+1) reflect vector."""
    theta = np.asarray(theta, dtype=float)
    return np.concatenate([np.exp(-1j * theta), [1.0 + 0.0j]])


def without_irs(real):
    """Copy of a realization with the reflecting surface disabled."""
    return _derive(real.h_direct.copy(), np.zeros_like(real.h_ue_irs), real.h_irs_ap.copy())


def displace_ues(cfg, offset):
    """Move every user radially away from the surface by `offset` meters."""
    if offset < 0:
        raise DomainError("offset must be >= 0")
    irs = np.asarray(cfg.irs_pos, float)
    moved = []
    for u in cfg.ue_pos:
        u = np.asarray(u, float)
        direction = u - irs
        norm = np.linalg.norm(direction)
        if norm == 0:
            raise DomainError("user sits exactly on the surface; direction undefined")
        moved.append(tuple(u + offset * direction / norm))
    return replace(cfg, ue_pos=tuple(moved))
