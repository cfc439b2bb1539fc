"""Achievable rates, power draw, energy efficiency, and the concave rate surrogate.

The uplink decodes users successively: sorted by composite gain, the user
decoded last sees a clean channel, and the SINR of user k only carries
interference from users that decode after it (its predecessors in the sorted
order). The log-sum objective and the per-user surrogate below are the two
faces of that structure.

A RateContext captures everything scheme-dependent (per-user bandwidth, noise
normalizer, interference sets, objective grouping) so the orthogonal-access
baseline can reuse every function here unchanged.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from . import channel

__all__ = [
    "Allocation",
    "AuxState",
    "RateContext",
    "dinkelbach_objective",
    "effective_gain",
    "energy_efficiency",
    "gain_table",
    "lemma1_update",
    "local_rate",
    "log_sum_rate",
    "offload_rate",
    "rate_slack",
    "sinr",
    "sum_power",
    "sum_rate",
    "surrogate_rate",
    "total_power",
]

LN2 = float(np.log(2.0))


@dataclass
class Allocation:
    """One operating point: transmit powers, CPU frequencies, beams, reflect vector."""

    p: np.ndarray        # (K,) offload transmit power, W
    f: np.ndarray        # (K,) local CPU frequency, Hz
    beams: np.ndarray    # (K, N) unit-norm receive beam per user
    reflect: np.ndarray  # (M+1,) lifted unit-modulus reflect vector

    def copy(self):
        return Allocation(self.p.copy(), self.f.copy(), self.beams.copy(),
                          self.reflect.copy())


@dataclass
class AuxState:
    """Slowly-updated auxiliaries: surrogate multipliers t and the EE ratio weight."""

    t: np.ndarray   # (K,) Lemma-style interference multipliers
    eta1: float     # current bits-per-joule weight in the fractional objective

    def copy(self):
        return AuxState(self.t.copy(), float(self.eta1))


@dataclass(frozen=True)
class RateContext:
    """Scheme-dependent rate structure.

    a          gain normalizer: SINR = a * p * |g|^2 / (1 + a * interference)
    user_bw    per-user bandwidth (Hz)
    preds      per-user tuple of interfering user indices (decoded later)
    groups     ((bandwidth_hz, member_indices), ...) for the sum-rate objective
    """

    a: float
    user_bw: np.ndarray
    preds: tuple
    groups: tuple

    @staticmethod
    def noma(real, cfg):
        """Shared-band successive decoding: one log-sum group over all users."""
        order = real.sic_order
        preds = [()] * cfg.num_users
        for pos, u in enumerate(order):
            preds[u] = tuple(int(i) for i in order[:pos])
        return RateContext(
            a=1.0 / cfg.noise_w,
            user_bw=np.full(cfg.num_users, cfg.bandwidth_hz),
            preds=tuple(preds),
            groups=((cfg.bandwidth_hz, tuple(range(cfg.num_users))),),
        )

    @staticmethod
    def oma(real, cfg):
        """Orthogonal access: band split K ways, per-subband noise scales down too."""
        k = cfg.num_users
        bw = cfg.bandwidth_hz / k
        return RateContext(
            a=k / cfg.noise_w,
            user_bw=np.full(k, bw),
            preds=tuple(() for _ in range(k)),
            groups=tuple((bw, (u,)) for u in range(k)),
        )


def _ctx(real, cfg, ctx):
    return ctx if ctx is not None else RateContext.noma(real, cfg)


def gain_table(real, alloc):
    """|composite channel|^2 per user at the current beams and reflect vector."""
    rows = np.conj(alloc.reflect) @ real.h_composite          # (K, N)
    amp = np.einsum("kn,kn->k", rows, alloc.beams)
    return np.abs(amp) ** 2


def effective_gain(real, alloc, cfg, k, ctx=None):
    """Normalized power gain a * |g_k|^2: SNR contributed per transmit watt."""
    ctx = _ctx(real, cfg, ctx)
    g = channel.composite_gain(real, k, alloc.reflect, alloc.beams[k])
    return ctx.a * abs(g) ** 2


def sinr(real, alloc, cfg, k, ctx=None):
    """Post-SIC SINR of user k."""
    ctx = _ctx(real, cfg, ctx)
    v = gain_table(real, alloc)
    interference = sum(alloc.p[i] * v[i] for i in ctx.preds[k])
    return ctx.a * alloc.p[k] * v[k] / (1.0 + ctx.a * interference)


def offload_rate(real, alloc, cfg, k, ctx=None):
    """Offloading rate of user k in bits/s."""
    ctx = _ctx(real, cfg, ctx)
    return ctx.user_bw[k] * np.log2(1.0 + sinr(real, alloc, cfg, k, ctx))


def local_rate(alloc, cfg, k):
    """Local computing rate f_k / C in bits/s."""
    return alloc.f[k] / cfg.cycles_per_bit


def total_power(alloc, cfg, k):
    """Power drawn by user k: weighted transmit + CPU cubic + circuit."""
    return (cfg.tx_power_weight * alloc.p[k]
            + cfg.cpu_kappa * alloc.f[k] ** 3
            + cfg.circuit_w)


def sum_rate(real, alloc, cfg, ctx=None):
    ctx = _ctx(real, cfg, ctx)
    return sum(offload_rate(real, alloc, cfg, k, ctx) + local_rate(alloc, cfg, k)
               for k in range(real.num_users))


def sum_power(alloc, cfg):
    return sum(total_power(alloc, cfg, k) for k in range(len(alloc.p)))


def energy_efficiency(real, alloc, cfg, ctx=None):
    """System EE in bits per joule: total processed bits over total power."""
    return sum_rate(real, alloc, cfg, ctx) / sum_power(alloc, cfg)


def lemma1_update(x):
    """Tight multiplier for the -ln x majorization: t* = 1/x.

    -ln x = max_{t>0} (-t x + ln t + 1), attained at t = 1/x; any other t
    gives a global lower bound on -ln x.
    """
    if x <= 0:
        raise DomainError(f"lemma1_update needs x > 0, got {x}")
    return 1.0 / x


def _interference_plus_one(real, alloc, cfg, k, ctx):
    v = gain_table(real, alloc)
    return 1.0 + ctx.a * sum(alloc.p[i] * v[i] for i in ctx.preds[k])


def surrogate_rate(real, alloc, cfg, aux, k, ctx=None):
    """Concave lower bound on user k's offload rate at multiplier aux.t[k].

    Equals offload_rate exactly when aux.t[k] = 1/(1 + a * interference_k)
    and lies below it otherwise.
    """
    ctx = _ctx(real, cfg, ctx)
    t = aux.t[k]
    if t <= 0:
        raise DomainError(f"surrogate multiplier must be > 0, got {t}")
    v = gain_table(real, alloc)
    covered = 1.0 + ctx.a * sum(alloc.p[i] * v[i] for i in (*ctx.preds[k], k))
    interf = _interference_plus_one(real, alloc, cfg, k, ctx)
    phi = np.log(covered) + np.log(t) + 1.0 - t * interf
    return ctx.user_bw[k] / LN2 * phi


def log_sum_rate(real, alloc, cfg, ctx=None):
    """Group log-sum rate plus local rates (bits/s).

    For the shared-band scheme this is B log2(1 + a sum_k p_k |g_k|^2) plus
    the local rates; telescoping makes it equal the sum of per-user offload
    rates, which the tests verify numerically. The subproblem solvers maximize
    this form.
    """
    ctx = _ctx(real, cfg, ctx)
    v = gain_table(real, alloc)
    rate = 0.0
    for bw, members in ctx.groups:
        rate += bw / LN2 * np.log(1.0 + ctx.a * sum(alloc.p[i] * v[i] for i in members))
    rate += sum(local_rate(alloc, cfg, k) for k in range(real.num_users))
    return rate


def dinkelbach_objective(real, alloc, cfg, aux, ctx=None):
    """Ratio-weighted net objective: rate minus aux.eta1 times power (bits/s)."""
    return log_sum_rate(real, alloc, cfg, ctx) - aux.eta1 * sum_power(alloc, cfg)


def rate_slack(real, alloc, cfg, ctx=None):
    """Worst-user slack of the true service-rate constraint, in bits/s.

    Positive means every user meets rate_min_bps.
    """
    ctx = _ctx(real, cfg, ctx)
    slacks = [offload_rate(real, alloc, cfg, k, ctx) + local_rate(alloc, cfg, k)
              - cfg.rate_min_bps for k in range(real.num_users)]
    return min(slacks)
