"""Comparison schemes built on the alternating optimizer.

Four schemes share one code path and differ only in the rate context and in
which blocks are optimized:

- Efficiency-IRS: the full design (NOMA, CPU frequencies, reflect phases).
- OMA-IRS: orthogonal channel shares instead of superposition; each user
  gets bandwidth B/K and sees no multi-user interference.
- OnlyOff-IRS: all bits are offloaded; CPU frequencies are pinned at zero.
- Efficiency-NoIRS: the reflecting surface is removed (its channels zeroed)
  and the phase block is skipped.

Each runner returns a SchemeResult evaluated on the realization it actually
optimized, so the NoIRS scheme is scored without the surface.
"""

from dataclasses import dataclass

from .channel import without_irs
from .optimizer import RunTrace, alternate
from .ratemodel import (Allocation, RateContext, energy_efficiency, sum_power,
                        sum_rate)

__all__ = [
    "SCHEME_RUNNERS",
    "SchemeResult",
    "run_noirs",
    "run_oma",
    "run_onlyoff",
    "run_proposed",
]


@dataclass
class SchemeResult:
    scheme: str
    ee_bits_per_joule: float
    rate_bits_per_s: float
    power_w: float
    iterations: int
    converged: bool
    feasible: bool           # some iterate met the per-user minimum rate
    alloc: Allocation
    trace: RunTrace


def _finish(scheme, real, cfg, ctx, alloc, trace):
    return SchemeResult(
        scheme=scheme,
        ee_bits_per_joule=energy_efficiency(real, alloc, cfg, ctx),
        rate_bits_per_s=sum_rate(real, alloc, cfg, ctx),
        power_w=sum_power(alloc, cfg),
        iterations=trace.iterations,
        converged=trace.converged,
        feasible=trace.feasible,
        alloc=alloc,
        trace=trace,
    )


def run_proposed(real, cfg, streams=None, opts=None):
    """Full design: NOMA with offloading, local computing, receive beams and
    reflect phases all optimized."""
    ctx = RateContext.noma(real, cfg)
    alloc, trace = alternate(real, cfg, ctx=ctx, opts=opts, streams=streams)
    return _finish("Efficiency-IRS", real, cfg, ctx, alloc, trace)


def run_oma(real, cfg, streams=None, opts=None):
    """Orthogonal access: users split the bandwidth evenly and decode free of
    interference; everything else is optimized as in the full design."""
    ctx = RateContext.oma(real, cfg)
    alloc, trace = alternate(real, cfg, ctx=ctx, opts=opts, streams=streams)
    return _finish("OMA-IRS", real, cfg, ctx, alloc, trace)


def run_onlyoff(real, cfg, streams=None, opts=None):
    """Offloading only: CPU frequencies are pinned at zero so every bit is
    pushed through the uplink."""
    ctx = RateContext.noma(real, cfg)
    alloc, trace = alternate(real, cfg, ctx=ctx, opts=opts, streams=streams,
                             optimize_freq=False)
    return _finish("OnlyOff-IRS", real, cfg, ctx, alloc, trace)


def run_noirs(real, cfg, streams=None, opts=None):
    """No reflecting surface: the cascade channels are zeroed out and the
    phase block is skipped; only the direct links carry traffic."""
    bare = without_irs(real)
    ctx = RateContext.noma(bare, cfg)
    alloc, trace = alternate(bare, cfg, ctx=ctx, opts=opts, streams=streams,
                             optimize_phase=False)
    return _finish("Efficiency-NoIRS", bare, cfg, ctx, alloc, trace)


SCHEME_RUNNERS = {
    "Efficiency-IRS": run_proposed,
    "OMA-IRS": run_oma,
    "OnlyOff-IRS": run_onlyoff,
    "Efficiency-NoIRS": run_noirs,
}
