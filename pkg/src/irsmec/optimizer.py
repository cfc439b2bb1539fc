"""Alternating maximization of uplink energy efficiency.

One outer iteration updates, in order: transmit powers and CPU frequencies,
receive beams (lifted, then rank-one recovery per user), and the reflect
phases (lifted, then recovery). The fractional objective is handled by a
ratio parameter eta1 that is reset to the achieved energy efficiency after
every iteration, and the interference surrogate multipliers t are refreshed
at the same point. The loop stops when the relative change of eta1 falls
below the configured tolerance or the iteration cap is hit.

A failed subproblem (infeasible rate target at the current block) or a
recovery without any feasible candidate does not abort the run: the previous
block value is kept, the iteration is flagged, and the loop continues. The
returned allocation is the best rate-feasible iterate seen, falling back to
the best iterate overall when no iterate was rate-feasible.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .channel import w_bar_from_phases
from .errors import InfeasibleError
from .numerics import SeedStreams
from .ratemodel import (Allocation, AuxState, RateContext, dinkelbach_objective,
                        energy_efficiency, gain_table, lemma1_update, rate_slack,
                        sum_power, sum_rate)
from .solvers import (SolverOptions, phases_from_lifted, recover_rank1,
                      solve_beamforming, solve_irs_phase, solve_power_freq)

__all__ = [
    "IterationRecord",
    "RunTrace",
    "alternate",
    "dinkelbach_update",
    "initialize",
]


@dataclass
class IterationRecord:
    iteration: int
    eta1: float                  # ratio parameter entering the iteration
    ee: float                    # energy efficiency achieved, bits/J
    rate_bits: float             # sum rate, bits/s
    power_w: float               # total power, W
    obj_power_freq: float        # subproblem objectives, bits/s (nan = skipped)
    obj_beam: float
    obj_phase: float
    flagged: bool                # a block failed or recovery was infeasible
    rate_feasible: bool          # all users meet the minimum rate here
    alloc: Allocation            # snapshot after the iteration
    wall_time_s: float


@dataclass
class RunTrace:
    records: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    flagged_iterations: int = 0
    best_iteration: int = -1

    @property
    def feasible(self):
        return any(r.rate_feasible for r in self.records)


def initialize(real, cfg, ctx=None):
    """Starting point: all-ones reflect phases, matched-filter beams on the
    composite channels, half the power budget spent on transmission and a
    quarter on computation."""
    ctx = ctx if ctx is not None else RateContext.noma(real, cfg)
    k_users = real.num_users
    reflect = np.ones(real.num_elements + 1, complex)
    rows = np.conj(reflect) @ real.h_composite
    beams = np.empty_like(rows)
    for k in range(k_users):
        norm = np.linalg.norm(rows[k])
        if norm > 0.0:
            beams[k] = rows[k].conj() / norm
        else:
            beams[k] = 0.0
            beams[k, 0] = 1.0
    budget = cfg.power_budget_w
    p = np.full(k_users, budget / 2.0)
    f = np.full(k_users, (budget / (4.0 * cfg.cpu_kappa)) ** (1.0 / 3.0))
    alloc = Allocation(p=p, f=f, beams=beams, reflect=reflect)
    return alloc, dinkelbach_update(real, alloc, cfg, ctx)


def dinkelbach_update(real, alloc, cfg, ctx=None):
    """Auxiliary state at an allocation: surrogate multipliers set to the
    reciprocal interference-plus-noise terms and the ratio parameter set to
    the achieved energy efficiency."""
    ctx = ctx if ctx is not None else RateContext.noma(real, cfg)
    gains = gain_table(real, alloc)
    t = np.empty(real.num_users)
    for k in range(real.num_users):
        interf = 1.0 + sum(ctx.a * alloc.p[i] * gains[i] for i in ctx.preds[k])
        t[k] = lemma1_update(interf)
    return AuxState(t=t, eta1=energy_efficiency(real, alloc, cfg, ctx))


def _try_block(fn, flags):
    try:
        return fn()
    except InfeasibleError:
        flags.append(True)
        return None


def _recover_beams(real, alloc, aux, cfg, ctx, lifted, num_candidates, rng):
    """Sequential per-user rank-one recovery in decoding order. Candidates
    are scored by the exact ratio-weighted objective with the rest of the
    allocation held fixed; the previous beam is kept when nothing feasible
    comes out."""
    any_infeasible = False
    for k in range(real.num_users):
        def objective_fn(m, k=k):
            saved = alloc.beams[k].copy()
            alloc.beams[k] = m
            val = dinkelbach_objective(real, alloc, cfg, aux, ctx)
            alloc.beams[k] = saved
            return val

        def violation_fn(m, k=k):
            saved = alloc.beams[k].copy()
            alloc.beams[k] = m
            slack = rate_slack(real, alloc, cfg, ctx)
            alloc.beams[k] = saved
            return -slack

        rec = recover_rank1(lifted[k], objective_fn, violation_fn, "beam",
                            num_candidates, rng)
        if rec.feasible:
            alloc.beams[k] = rec.vector
        else:
            any_infeasible = True
    return not any_infeasible


def _recover_phases(real, alloc, aux, cfg, ctx, lifted, num_candidates, rng):
    """Rank-one recovery of the reflect vector; candidates are canonicalized
    through the extracted per-element phases so the stored vector always has
    a unit final entry."""

    def objective_fn(w):
        saved = alloc.reflect
        alloc.reflect = w_bar_from_phases(phases_from_lifted(w))
        val = dinkelbach_objective(real, alloc, cfg, aux, ctx)
        alloc.reflect = saved
        return val

    def violation_fn(w):
        saved = alloc.reflect
        alloc.reflect = w_bar_from_phases(phases_from_lifted(w))
        slack = rate_slack(real, alloc, cfg, ctx)
        alloc.reflect = saved
        return -slack

    rec = recover_rank1(lifted, objective_fn, violation_fn, "phase",
                        num_candidates, rng)
    if rec.feasible:
        alloc.reflect = w_bar_from_phases(phases_from_lifted(rec.vector))
        return True
    return False


def alternate(real, cfg, ctx=None, opts=None, streams=None, optimize_freq=True,
              optimize_phase=True, max_iters=None, conv_tol=None,
              num_candidates=None):
    """Run the alternating loop and return (best allocation, trace).

    streams seeds the recovery randomization; the stream is re-opened at the
    same position every iteration so candidate draws are common across
    iterations, which keeps the ratio updates from chasing sampling noise.
    optimize_freq=False pins CPU frequencies at their initial value and
    optimize_phase=False skips the reflect-phase block entirely.
    """
    ctx = ctx if ctx is not None else RateContext.noma(real, cfg)
    opts = opts or SolverOptions()
    streams = streams if streams is not None else SeedStreams(0)
    if isinstance(streams, int):
        streams = SeedStreams(streams)
    max_iters = cfg.max_iters if max_iters is None else max_iters
    conv_tol = cfg.conv_tol if conv_tol is None else conv_tol
    if num_candidates is None:
        num_candidates = opts.num_candidates
    n_cand = cfg.num_candidates if num_candidates is None else num_candidates

    alloc, aux = initialize(real, cfg, ctx)
    if not optimize_freq:
        alloc.f = np.zeros(real.num_users)
        aux = dinkelbach_update(real, alloc, cfg, ctx)

    trace = RunTrace()
    for it in range(max_iters):
        started = time.perf_counter()
        flags = []
        rng = streams.stream("randomization")

        pf = _try_block(lambda: solve_power_freq(
            real, alloc, aux, cfg, opts, ctx, optimize_freq=optimize_freq), flags)
        if pf is not None:
            alloc.p = pf.p
            if optimize_freq:
                alloc.f = pf.f

        beam_sols = _try_block(lambda: solve_beamforming(
            real, alloc, aux, cfg, opts, ctx), flags)
        if beam_sols is not None:
            if not _recover_beams(real, alloc, aux, cfg, ctx, beam_sols,
                                  n_cand, rng):
                flags.append(True)

        phase_sol = None
        if optimize_phase and real.num_elements > 0:
            phase_sol = _try_block(lambda: solve_irs_phase(
                real, alloc, aux, cfg, opts, ctx), flags)
            if phase_sol is not None:
                if not _recover_phases(real, alloc, aux, cfg, ctx, phase_sol,
                                       n_cand, rng):
                    flags.append(True)

        ee = energy_efficiency(real, alloc, cfg, ctx)
        slack = rate_slack(real, alloc, cfg, ctx)
        record = IterationRecord(
            iteration=it,
            eta1=aux.eta1,
            ee=ee,
            rate_bits=sum_rate(real, alloc, cfg, ctx),
            power_w=sum_power(alloc, cfg),
            obj_power_freq=pf.objective if pf is not None else np.nan,
            obj_beam=beam_sols[0].objective if beam_sols else np.nan,
            obj_phase=phase_sol.objective if phase_sol is not None else np.nan,
            flagged=bool(flags),
            rate_feasible=slack >= -1e-6 * max(cfg.rate_min_bps, 1.0),
            alloc=alloc.copy(),
            wall_time_s=time.perf_counter() - started,
        )
        trace.records.append(record)
        trace.iterations = it + 1
        if flags:
            trace.flagged_iterations += 1

        eta_prev = aux.eta1
        aux = dinkelbach_update(real, alloc, cfg, ctx)
        if abs(aux.eta1 - eta_prev) <= conv_tol * max(abs(eta_prev), 1e-30):
            trace.converged = True
            break

    feasible = [r for r in trace.records if r.rate_feasible]
    pool = feasible if feasible else trace.records
    best = max(pool, key=lambda r: r.ee)
    trace.best_iteration = best.iteration
    return best.alloc.copy(), trace
