"""Convex subproblem solvers for the alternating energy-efficiency loop.

Three subproblems are solved per outer iteration, all sharing one structure:
maximize a concave objective built from logs of affine forms, subject to
per-user surrogate-rate constraints and either box/cubic power constraints
(power+frequency step) or a PSD cone with a fixed trace/diagonal (lifted
receive-beam and reflect-phase steps).

Everything runs through a small self-contained log-barrier interior method:
maximize objective + mu * (sum of log slacks + log det of each PSD block) by
damped Newton steps, shrinking mu geometrically until the gap proxy
mu * (cone orders + scalar constraint count) drops below tol. Hermitian
matrix variables are parameterized by their free real coordinates (the
diagonal is pinned by the trace-one / unit-diagonal constraint), so every
subproblem reduces to Newton iterations over an open domain.

Internally rates are normalized to nats (divided by B/ln2), transmit powers
to the per-user budget, and CPU frequencies to the budget-saturating
frequency, which keeps all quantities O(1) and lets a single mu schedule
serve every instance.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError, InfeasibleError
from .numerics import eig_hermitian, sample_cgauss
from .ratemodel import LN2, RateContext, gain_table, local_rate, sum_power

__all__ = [
    "ConicSolution",
    "PowerFreqSolution",
    "RecoveryResult",
    "SolverOptions",
    "phases_from_lifted",
    "recover_rank1",
    "solve_beamforming",
    "solve_irs_phase",
    "solve_power_freq",
]


@dataclass(frozen=True)
class SolverOptions:
    """Interior-method knobs. Defaults are adequate for every test scenario."""

    tol: float = 1.0e-6        # duality-gap proxy target, normalized units
    mu0: float = 1.0           # initial barrier weight
    mu_shrink: float = 0.2     # geometric barrier schedule
    max_newton: int = 60       # Newton steps per barrier stage
    max_total_newton: int = 800
    armijo: float = 0.25
    # Rate-constraint relaxation inside the two lifted subproblems, in
    # normalized rate units. The alternating loop often parks the exact rate
    # of some user on the minimum-rate boundary, which leaves the lifted
    # feasible set without a usable interior; a small margin restores one.
    # Rank-one recovery validates candidates against the unrelaxed target,
    # so the relaxation never leaks into accepted allocations.
    slater_margin: float = 1.0e-4
    # Gaussian randomization pool size for rank-one recovery. None defers to
    # the per-scenario configuration value.
    num_candidates: int | None = None


@dataclass
class PowerFreqSolution:
    p: np.ndarray            # (K,) transmit powers, W
    f: np.ndarray            # (K,) CPU frequencies, Hz
    objective: float         # subproblem objective at the solution, bits/s
    kkt_residual: float      # barrier gap proxy at exit (normalized)
    iterations: int          # Newton steps spent


@dataclass
class ConicSolution:
    matrix: np.ndarray       # lifted PSD solution
    objective: float         # joint subproblem objective, bits/s
    kkt_residual: float
    iterations: int


@dataclass
class RecoveryResult:
    vector: np.ndarray       # feasible-form candidate (unit norm / unit modulus)
    objective: float
    feasible: bool
    randomized: bool         # False when the lifted solution was already rank one


# ---------------------------------------------------------------------------
# scalar functions: sum of w*ln(c0 + c.x) terms + linear + cubic + constant
# ---------------------------------------------------------------------------

class _ScalarFunc:
    __slots__ = ("dim", "logs", "lin", "cube", "const")

    def __init__(self, dim, const=0.0):
        self.dim = dim
        self.logs = []               # (weight, c0, coefficient vector)
        self.lin = np.zeros(dim)
        self.cube = None
        self.const = float(const)

    def add_log(self, w, c0, c):
        self.logs.append((float(w), float(c0), np.asarray(c, float)))

    def ensure_cube(self):
        if self.cube is None:
            self.cube = np.zeros(self.dim)
        return self.cube

    def value(self, x):
        v = self.const + self.lin @ x
        if self.cube is not None:
            v += self.cube @ (x ** 3)
        for w, c0, c in self.logs:
            y = c0 + c @ x
            if y <= 0.0:
                return -np.inf
            v += w * np.log(y)
        return v

    def eval(self, x):
        """Return (value, gradient, hessian); hessian is None when absent."""
        v = self.const + self.lin @ x
        g = self.lin.copy()
        h = None
        if self.cube is not None:
            v += self.cube @ (x ** 3)
            g += 3.0 * self.cube * x ** 2
            h = np.diag(6.0 * self.cube * x)
        for w, c0, c in self.logs:
            y = c0 + c @ x
            if y <= 0.0:
                return -np.inf, g, h
            v += w * np.log(y)
            g += (w / y) * c
            contrib = (-w / y ** 2) * np.outer(c, c)
            h = contrib if h is None else h + contrib
        return v, g, h

    def extended(self, extra_lin):
        """Copy of self over one extra trailing variable with linear weight."""
        out = _ScalarFunc(self.dim + 1, self.const)
        out.lin[:-1] = self.lin
        out.lin[-1] = extra_lin
        if self.cube is not None:
            out.ensure_cube()[:-1] = self.cube
        for w, c0, c in self.logs:
            out.add_log(w, c0, np.append(c, 0.0))
        return out

    def is_constant(self, tol=1e-15):
        small = np.max(np.abs(self.lin), initial=0.0) <= tol
        if self.cube is not None:
            small &= np.max(np.abs(self.cube), initial=0.0) <= tol
        for _, _, c in self.logs:
            small &= np.max(np.abs(c), initial=0.0) <= tol
        return bool(small)


# ---------------------------------------------------------------------------
# PSD blocks: Hermitian matrices parameterized by free real coordinates
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _offdiag_pairs(n):
    p, q = np.triu_indices(n, 1)
    p.setflags(write=False)
    q.setflags(write=False)
    return p, q


@lru_cache(maxsize=None)
def _trace1_basis(n):
    """Hermitian basis of the trace-one affine slice: diagonal differences
    against the last entry, then real and imaginary off-diagonal pairs."""
    p, q = _offdiag_pairs(n)
    mats = []
    for a in range(n - 1):
        b = np.zeros((n, n), complex)
        b[a, a] = 1.0
        b[n - 1, n - 1] = -1.0
        mats.append(b)
    for i in range(len(p)):
        b = np.zeros((n, n), complex)
        b[p[i], q[i]] = 1.0
        b[q[i], p[i]] = 1.0
        mats.append(b)
    for i in range(len(p)):
        b = np.zeros((n, n), complex)
        b[p[i], q[i]] = 1j
        b[q[i], p[i]] = -1j
        mats.append(b)
    out = np.array(mats)
    out.setflags(write=False)
    return out


class _Trace1Block:
    """Hermitian matrix with trace pinned to one; n*n - 1 free coordinates."""

    def __init__(self, n, offset=0):
        self.n = n
        self.dim = n * n - 1
        self.sl = slice(offset, offset + self.dim)
        self.p, self.q = _offdiag_pairs(n)

    def matrix(self, x):
        xb = x[self.sl]
        n, noff = self.n, len(self.p)
        m = np.zeros((n, n), complex)
        diag = xb[:n - 1]
        np.fill_diagonal(m, np.append(diag, 1.0 - diag.sum()))
        off = xb[n - 1:n - 1 + noff] + 1j * xb[n - 1 + noff:]
        m[self.p, self.q] = off
        m[self.q, self.p] = off.conj()
        return m

    def coords(self, m):
        off = m[self.p, self.q]
        return np.concatenate([np.diag(m).real[:self.n - 1], off.real, off.imag])

    def lin_coefs(self, h):
        """Tr(h X(x)) = const + coefs . x_block for Hermitian h."""
        n = self.n
        off = h[self.p, self.q]
        coefs = np.concatenate([np.diag(h).real[:n - 1] - h[n - 1, n - 1].real,
                                2.0 * off.real, 2.0 * off.imag])
        return coefs, float(h[n - 1, n - 1].real)

    def logdet_grad_hess(self, s):
        g, _ = self.lin_coefs(s)
        basis = _trace1_basis(self.n)
        t1 = np.matmul(basis, s)
        t2 = np.matmul(s[None, :, :], t1)
        h = -np.einsum("aij,bji->ab", t2, basis).real
        return g, h


class _UnitDiagBlock:
    """Hermitian matrix with unit diagonal; n(n-1) free coordinates."""

    def __init__(self, n, offset=0):
        self.n = n
        self.p, self.q = _offdiag_pairs(n)
        self.dim = 2 * len(self.p)
        self.sl = slice(offset, offset + self.dim)

    def matrix(self, x):
        xb = x[self.sl]
        noff = len(self.p)
        m = np.eye(self.n, dtype=complex)
        off = xb[:noff] + 1j * xb[noff:]
        m[self.p, self.q] = off
        m[self.q, self.p] = off.conj()
        return m

    def coords(self, m):
        off = m[self.p, self.q]
        return np.concatenate([off.real, off.imag])

    def lin_coefs(self, h):
        off = h[self.p, self.q]
        coefs = np.concatenate([2.0 * off.real, 2.0 * off.imag])
        return coefs, float(np.trace(h).real)

    def logdet_grad_hess(self, s):
        p, q = self.p, self.q
        spq = s[p, q]
        g = np.concatenate([2.0 * spq.real, 2.0 * spq.imag])
        # Hessian entries -Tr(S B_a S B_b) reduce to products of S entries
        # because each basis matrix has exactly two nonzeros.
        a = s[np.ix_(q, p)]
        u = a * a.T                                  # S[qa, pb] * S[qb, pa]
        v = s[np.ix_(q, q)] * s[np.ix_(p, p)].T      # S[qa, qb] * S[pb, pa]
        hrr = -2.0 * (u + v).real
        hii = 2.0 * (u - v).real
        hri = 2.0 * (u - v).imag
        return g, np.block([[hrr, hri], [hri.T, hii]])


def _blocks_ok(x, blocks):
    for b in blocks:
        try:
            np.linalg.cholesky(b.matrix(x))
        except np.linalg.LinAlgError:
            return False
    return True


def _blocks_logdet(x, blocks):
    total = 0.0
    for b in blocks:
        try:
            chol = np.linalg.cholesky(b.matrix(x))
        except np.linalg.LinAlgError:
            return -np.inf
        total += 2.0 * np.log(np.diag(chol).real).sum()
    return total


# ---------------------------------------------------------------------------
# barrier engine
# ---------------------------------------------------------------------------

def _barrier_value(x, obj, cons, blocks, mu):
    total = obj.value(x)
    if not np.isfinite(total):
        return -np.inf
    for c in cons:
        s = c.value(x)
        if s <= 0.0 or not np.isfinite(s):
            return -np.inf
        total += mu * np.log(s)
    ld = _blocks_logdet(x, blocks)
    if not np.isfinite(ld):
        return -np.inf
    return total + mu * ld


def _barrier_grad_hess(x, obj, cons, blocks, mu):
    dim = len(x)
    f, g, h = obj.eval(x)
    hess = np.zeros((dim, dim)) if h is None else h
    grad = g
    for c in cons:
        s, sg, sh = c.eval(x)
        if s <= 0.0 or not np.isfinite(s):
            return -np.inf, grad, hess
        f += mu * np.log(s)
        grad += (mu / s) * sg
        hess -= (mu / s ** 2) * np.outer(sg, sg)
        if sh is not None:
            hess += (mu / s) * sh
    for b in blocks:
        try:
            mat = b.matrix(x)
            chol = np.linalg.cholesky(mat)
        except np.linalg.LinAlgError:
            return -np.inf, grad, hess
        f += mu * 2.0 * np.log(np.diag(chol).real).sum()
        s_inv = np.linalg.inv(mat)
        s_inv = 0.5 * (s_inv + s_inv.conj().T)
        bg, bh = b.logdet_grad_hess(s_inv)
        grad[b.sl] += mu * bg
        hess[b.sl, b.sl] += mu * bh
    return f, grad, hess


def _newton_direction(hess, grad):
    scale = max(float(np.max(np.abs(hess), initial=0.0)), 1.0)
    eye = np.eye(len(grad))
    for ridge in (0.0, 1e-12, 1e-9, 1e-6, 1e-3):
        try:
            d = np.linalg.solve(hess - ridge * scale * eye, -grad)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(d)) and grad @ d >= 0.0:
            return d
    return grad / scale


def _barrier_maximize(x0, obj, cons, blocks, opts, stop_when=None):
    """Maximize obj + mu*(log slacks + log dets) along the mu schedule.

    Returns (x, newton_steps, gap_proxy). The caller guarantees x0 is
    strictly feasible (positive slacks, PD blocks).
    """
    x = np.asarray(x0, float).copy()
    m_total = max(len(cons) + sum(b.n for b in blocks), 1)
    mu = opts.mu0
    steps = 0
    while True:
        for _ in range(opts.max_newton):
            if steps >= opts.max_total_newton:
                break
            f, grad, hess = _barrier_grad_hess(x, obj, cons, blocks, mu)
            if not np.isfinite(f):
                break
            d = _newton_direction(hess, grad)
            lam2 = float(grad @ d)
            if lam2 / 2.0 <= 1e-9 * (1.0 + abs(f)):
                break
            step, accepted = 1.0, False
            while step > 1e-13:
                xn = x + step * d
                fn = _barrier_value(xn, obj, cons, blocks, mu)
                if fn > f + opts.armijo * step * lam2 - 1e-13 * (1.0 + abs(f)):
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
            x = xn
            steps += 1
            if stop_when is not None and stop_when(x):
                return x, steps, mu * m_total
        if mu * m_total < opts.tol:
            break
        mu *= opts.mu_shrink
    return x, steps, mu * m_total


class _NoInterior(Exception):
    """Raised when no strictly feasible point exists; carries best slacks."""

    def __init__(self, slacks, users=None):
        self.slacks = list(slacks)
        self.users = list(users) if users is not None else None
        super().__init__("no strictly feasible point found")


_EPS_IN = 1e-7  # slack margin required to accept a starting point directly


def _find_interior(cands, soft, hard, blocks, dim, opts):
    """Strictly feasible point for soft+hard constraints and PD blocks.

    Candidates are tried in order; if none works a feasibility phase
    maximizes the worst soft slack, stopping as soon as a comfortably
    interior point appears. Raises _NoInterior with the best achieved
    slacks when the feasible set is (numerically) empty.
    """
    base = None
    for x0 in cands:
        x0 = np.asarray(x0, float)
        if not _blocks_ok(x0, blocks):
            continue
        if any(h.value(x0) <= 0.0 for h in hard):
            continue
        if base is None:
            base = x0
        if all(s.value(x0) >= _EPS_IN for s in soft):
            return x0
    if base is None:
        raise _NoInterior([-np.inf] * max(len(soft), 1))
    if not soft:
        return base

    obj1 = _ScalarFunc(dim + 1)
    obj1.lin[-1] = 1.0
    soft1 = [s.extended(-1.0) for s in soft]
    hard1 = [h.extended(0.0) for h in hard]
    tau0 = min(s.value(base) for s in soft) - 1.0
    x1 = np.append(base, tau0)

    def interior_reached(x):
        return all(s.value(x[:dim]) >= _EPS_IN for s in soft)

    opts1 = replace(opts, tol=max(opts.tol, 1e-4))
    x_out, _, _ = _barrier_maximize(x1, obj1, soft1 + hard1, blocks, opts1,
                                    stop_when=interior_reached)
    x_found = x_out[:dim]
    slacks = [s.value(x_found) for s in soft]
    if min(slacks) > 0.0 and _blocks_ok(x_found, blocks) \
            and all(h.value(x_found) > 0.0 for h in hard):
        return x_found
    raise _NoInterior(slacks)


def _prune_constant(soft):
    """Drop x-independent constraints; raise if one is violated outright.

    Returns the kept constraints and the user index carried by each, so
    infeasibility reports can name the right user after pruning.
    """
    origin = np.zeros(soft[0].dim) if soft else None
    keep, users = [], []
    for k, s in enumerate(soft):
        if s.is_constant():
            val = s.value(origin)
            if val < -1e-9:
                raise _NoInterior([val], [k])
        else:
            keep.append(s)
            users.append(k)
    return keep, users


# ---------------------------------------------------------------------------
# normalized problem data shared by the three subproblems
# ---------------------------------------------------------------------------

class _Scales:
    """Normalization constants and the scheme context for one subproblem."""

    def __init__(self, real, alloc, aux, cfg, ctx):
        self.ctx = ctx if ctx is not None else RateContext.noma(real, cfg)
        self.rate_unit = cfg.bandwidth_hz / LN2       # bits/s per nat
        self.eta_n = aux.eta1 / self.rate_unit
        self.rth = cfg.rate_min_bps / self.rate_unit
        self.uw = np.asarray(self.ctx.user_bw) / cfg.bandwidth_hz
        self.groups = tuple((bw / cfg.bandwidth_hz, members)
                            for bw, members in self.ctx.groups)
        self.loc = np.array([local_rate(alloc, cfg, k)
                             for k in range(real.num_users)]) / self.rate_unit


def _rate_constraints(dim, sc, aux, coefs, consts, loc=None, margin=0.0):
    """Per-user surrogate-rate slack functions over linear SNR forms.

    coefs/consts give each user's received-power term v_k(x) = consts[k] +
    coefs[k] . x, already scaled by the noise factor and transmit power.
    loc overrides the normalized local rates (used when the local rate is
    itself a variable and enters through extra linear terms instead).
    margin relaxes the rate target by that many normalized rate units.
    """
    ctx, uw = sc.ctx, sc.uw
    loc = sc.loc if loc is None else loc
    out = []
    for k in range(len(consts)):
        t = aux.t[k]
        if t <= 0:
            raise DomainError(f"surrogate multiplier t[{k}] must be positive")
        s = _ScalarFunc(dim)
        covered = (*ctx.preds[k], k)
        c0 = 1.0 + sum(consts[i] for i in covered)
        cvec = np.zeros(dim)
        for i in covered:
            cvec = cvec + coefs[i]
        s.add_log(uw[k], c0, cvec)
        interf_const = 1.0 + sum(consts[i] for i in ctx.preds[k])
        for i in ctx.preds[k]:
            s.lin -= uw[k] * t * coefs[i]
        s.const = (uw[k] * (np.log(t) + 1.0 - t * interf_const)
                   + loc[k] - (sc.rth - margin))
        out.append(s)
    return out


def _infeasible(kind, exc, users, sc, cfg):
    if exc.users is not None:
        users = exc.users
    worst = int(np.argmin(exc.slacks))
    user = users[worst] if worst < len(users) else worst
    max_rate = cfg.rate_min_bps + exc.slacks[worst] * sc.rate_unit
    return InfeasibleError(kind, user, max_rate)


# ---------------------------------------------------------------------------
# power and CPU-frequency subproblem
# ---------------------------------------------------------------------------

def solve_power_freq(real, alloc, aux, cfg, opts=None, ctx=None, optimize_freq=True):
    """Maximize the ratio-weighted net rate over transmit powers and CPU
    frequencies at fixed beams and reflect vector.

    The problem is concave in this parameterization: logs of affine power
    forms, linear local rates, negative cubic CPU power. With
    optimize_freq=False the frequencies stay at alloc.f (offload-only
    schemes pass f = 0) and only the powers move.
    """
    opts = opts or SolverOptions()
    sc = _Scales(real, alloc, aux, cfg, ctx)
    k_users = real.num_users
    budget = cfg.power_budget_w
    v = gain_table(real, alloc)
    alpha = sc.ctx.a * v * budget            # received SNR per unit of p-hat
    f_ref = (budget / cfg.cpu_kappa) ** (1.0 / 3.0)
    loc_coef = f_ref / (cfg.cycles_per_bit * sc.rate_unit)
    dim = 2 * k_users if optimize_freq else k_users

    obj = _ScalarFunc(dim, const=-sc.eta_n * k_users * cfg.circuit_w)
    for w_g, members in sc.groups:
        c = np.zeros(dim)
        for i in members:
            c[i] = alpha[i]
        obj.add_log(w_g, 1.0, c)
    obj.lin[:k_users] = -sc.eta_n * cfg.tx_power_weight * budget
    if optimize_freq:
        obj.lin[k_users:] += loc_coef
        obj.ensure_cube()[k_users:] = -sc.eta_n * budget
    else:
        # fixed frequencies still contribute their rate and CPU power
        obj.const += sc.loc.sum()
        obj.const -= sc.eta_n * cfg.cpu_kappa * float(np.sum(alloc.f ** 3))

    coefs = []
    for k in range(k_users):
        c = np.zeros(dim)
        c[k] = alpha[k]
        coefs.append(c)
    loc = np.zeros(k_users) if optimize_freq else None
    soft = _rate_constraints(dim, sc, aux, coefs, np.zeros(k_users), loc=loc)
    if optimize_freq:
        for k in range(k_users):
            soft[k].lin[k_users + k] += loc_coef

    hard = []
    for k in range(k_users):
        cap = _ScalarFunc(dim, const=1.0)
        cap.lin[k] = -1.0
        if optimize_freq:
            cap.ensure_cube()[k_users + k] = -1.0
        hard.append(cap)
    for i in range(dim):
        bound = _ScalarFunc(dim)
        bound.lin[i] = 1.0
        hard.append(bound)

    cands = []
    neutral = np.full(dim, 0.3)
    if optimize_freq:
        neutral[k_users:] = 0.3 ** (1.0 / 3.0)
    cands.append(neutral)
    inc_p = np.clip(alloc.p / budget, 1e-9, 1.0 - 1e-6)
    if optimize_freq:
        inc_f = np.clip(alloc.f / f_ref, 1e-9, 1.0 - 1e-6)
        load = inc_p + inc_f ** 3
        shrink = np.minimum(1.0, (1.0 - 1e-6) / load)
        cands.append(np.concatenate([inc_p * shrink, inc_f * shrink ** (1.0 / 3.0)]))
    else:
        cands.append(inc_p)

    try:
        soft_kept, users = _prune_constant(soft)
        x0 = _find_interior(cands, soft_kept, hard, [], dim, opts)
    except _NoInterior as exc:
        raise _infeasible("power_freq", exc, list(range(k_users)), sc, cfg) from None

    x, steps, gap = _barrier_maximize(x0, obj, soft_kept + hard, [], opts)
    p = x[:k_users] * budget
    f = x[k_users:] * f_ref if optimize_freq else np.asarray(alloc.f, float).copy()
    return PowerFreqSolution(p, f, obj.value(x) * sc.rate_unit, gap, steps)


# ---------------------------------------------------------------------------
# lifted receive-beam and reflect-phase subproblems
# ---------------------------------------------------------------------------

def _conic_solve(kind, blocks, consts, coefs, dim, sc, aux, cfg, opts, cands,
                 const_obj):
    """Shared core of the two lifted subproblems: objective assembly,
    interior start, barrier maximization."""
    obj = _ScalarFunc(dim, const=const_obj)
    for w_g, members in sc.groups:
        c0 = 1.0 + sum(consts[i] for i in members)
        cvec = np.zeros(dim)
        for i in members:
            cvec = cvec + coefs[i]
        obj.add_log(w_g, c0, cvec)
    soft = _rate_constraints(dim, sc, aux, coefs, consts,
                             margin=opts.slater_margin)
    users = list(range(len(consts)))
    try:
        soft_kept, users = _prune_constant(soft)
        x0 = _find_interior(cands, soft_kept, [], blocks, dim, opts)
    except _NoInterior as exc:
        raise _infeasible(kind, exc, users, sc, cfg) from None
    x, steps, gap = _barrier_maximize(x0, obj, soft_kept, blocks, opts)
    return x, obj.value(x) * sc.rate_unit, gap, steps


def solve_beamforming(real, alloc, aux, cfg, opts=None, ctx=None):
    """Maximize the ratio-weighted net rate over lifted receive beams.

    One trace-one PSD block per user; the rank constraint is dropped here
    and restored afterwards by recover_rank1. Returns one ConicSolution per
    user, each carrying the shared joint objective.
    """
    opts = opts or SolverOptions()
    sc = _Scales(real, alloc, aux, cfg, ctx)
    k_users, n_ant = real.num_users, real.num_antennas
    rows = np.conj(alloc.reflect) @ real.h_composite          # (K, N)

    if n_ant == 1:
        # a single receive antenna pins every lifted matrix to [[1]]
        gains = np.abs(rows[:, 0]) ** 2
        obj = sc.loc.sum() - sc.eta_n * sum_power(alloc, cfg)
        for w_g, members in sc.groups:
            obj += w_g * np.log(1.0 + sum(sc.ctx.a * alloc.p[i] * gains[i]
                                          for i in members))
        return [ConicSolution(np.ones((1, 1), complex), obj * sc.rate_unit,
                              0.0, 0) for _ in range(k_users)]

    d_block = n_ant * n_ant - 1
    blocks = [_Trace1Block(n_ant, k * d_block) for k in range(k_users)]
    dim = k_users * d_block
    abar = sc.ctx.a * alloc.p
    consts = np.zeros(k_users)
    coefs = []
    for k in range(k_users):
        h_til = np.outer(rows[k].conj(), rows[k])
        local_coef, local_const = blocks[k].lin_coefs(h_til)
        c = np.zeros(dim)
        c[blocks[k].sl] = abar[k] * local_coef
        coefs.append(c)
        consts[k] = abar[k] * local_const
    const_obj = sc.loc.sum() - sc.eta_n * sum_power(alloc, cfg)

    cands = []
    eye_part = np.eye(n_ant) / n_ant
    for beta in (0.05, 0.25, 1.0):
        x0 = np.empty(dim)
        for k in range(k_users):
            lift = np.outer(alloc.beams[k], alloc.beams[k].conj())
            x0[blocks[k].sl] = blocks[k].coords((1.0 - beta) * lift + beta * eye_part)
        cands.append(x0)

    x, objective, gap, steps = _conic_solve("beamforming", blocks, consts,
                                            coefs, dim, sc, aux, cfg, opts,
                                            cands, const_obj)
    return [ConicSolution(b.matrix(x), objective, gap, steps) for b in blocks]


def solve_irs_phase(real, alloc, aux, cfg, opts=None, ctx=None):
    """Maximize the ratio-weighted net rate over the lifted reflect vector.

    One unit-diagonal PSD block shared by all users. With zero reflecting
    elements there is nothing to optimize and the current point is scored.
    """
    opts = opts or SolverOptions()
    sc = _Scales(real, alloc, aux, cfg, ctx)
    k_users = real.num_users
    n = real.num_elements + 1
    h_w = np.einsum("kmn,kn->km", real.h_composite, alloc.beams)   # (K, M+1)
    const_obj = sc.loc.sum() - sc.eta_n * sum_power(alloc, cfg)

    if real.num_elements == 0:
        gains = np.abs(h_w[:, 0]) ** 2
        obj = const_obj
        for w_g, members in sc.groups:
            obj += w_g * np.log(1.0 + sum(sc.ctx.a * alloc.p[i] * gains[i]
                                          for i in members))
        return ConicSolution(np.ones((1, 1), complex), obj * sc.rate_unit, 0.0, 0)

    block = _UnitDiagBlock(n)
    abar = sc.ctx.a * alloc.p
    consts = np.zeros(k_users)
    coefs = []
    for k in range(k_users):
        h_big = np.outer(h_w[k], h_w[k].conj())
        local_coef, local_const = block.lin_coefs(h_big)
        coefs.append(abar[k] * local_coef)
        consts[k] = abar[k] * local_const

    lift = np.outer(alloc.reflect, alloc.reflect.conj())
    cands = [block.coords((1.0 - beta) * lift + beta * np.eye(n))
             for beta in (0.05, 0.25, 1.0)]

    x, objective, gap, steps = _conic_solve("irs_phase", [block], consts,
                                            coefs, block.dim, sc, aux, cfg,
                                            opts, cands, const_obj)
    return ConicSolution(block.matrix(x), objective, gap, steps)


# ---------------------------------------------------------------------------
# rank-one recovery
# ---------------------------------------------------------------------------

_RANK1_THRESHOLD = 1.0 - 1e-6


def _project_candidate(z, mode):
    if mode == "beam":
        nz = np.linalg.norm(z)
        if nz == 0.0:
            out = np.zeros_like(z)
            out[0] = 1.0
            return out
        return z / nz
    if mode == "phase":
        return np.exp(1j * np.angle(z))
    raise ConfigError(f"unknown recovery mode {mode!r}")


def recover_rank1(lifted, objective_fn, violation_fn, mode, num_candidates, rng):
    """Extract a feasible rank-one point from a lifted PSD solution.

    If the top eigenvalue carries all but a 1e-6 fraction of the trace, the
    dominant eigenvector (unit-normalized for mode="beam", entrywise
    phase-projected for mode="phase") is returned directly. Otherwise
    num_candidates Gaussian draws z ~ CN(0, X) are projected to feasible
    form, the dominant eigenvector joins the pool, and the best candidate
    with violation_fn(v) <= 0 wins by objective_fn. When nothing passes,
    the least-violating candidate is returned with feasible=False.
    """
    x_mat = lifted.matrix if isinstance(lifted, ConicSolution) else np.asarray(lifted)
    dec = eig_hermitian(x_mat)
    trace = float(dec.eigenvalues.sum())
    top = _project_candidate(dec.eigenvectors[:, 0], mode)
    if trace <= 0.0 or dec.eigenvalues[0] >= _RANK1_THRESHOLD * trace:
        return RecoveryResult(top, float(objective_fn(top)),
                              float(violation_fn(top)) <= 0.0, False)
    if num_candidates == 0:
        raise ConfigError("lifted solution has rank > 1 but randomization is disabled")
    candidates = [top]
    n = x_mat.shape[0]
    for _ in range(num_candidates):
        candidates.append(_project_candidate(sample_cgauss(n, x_mat, rng), mode))
    best, best_obj = None, -np.inf
    least, least_viol = None, np.inf
    for cand in candidates:
        viol = float(violation_fn(cand))
        if viol <= 0.0:
            obj = float(objective_fn(cand))
            if obj > best_obj:
                best, best_obj = cand, obj
        elif viol < least_viol:
            least, least_viol = cand, viol
    if best is not None:
        return RecoveryResult(best, best_obj, True, True)
    return RecoveryResult(least, float(objective_fn(least)), False, True)


def phases_from_lifted(w_bar):
    """Per-element phase shifts encoded by a lifted reflect vector.

    The direct-path entry (last) anchors the global phase; the surface built
    from the returned angles reproduces the composite gain magnitude of
    w_bar exactly when all entries are unit-modulus.
    """
    w = np.asarray(w_bar, complex)
    if w.ndim != 1 or len(w) < 1:
        raise DomainError("w_bar must be a nonempty vector")
    if np.any(np.abs(w) == 0.0):
        raise DomainError("w_bar has a zero entry; phases undefined")
    theta = np.angle(w[-1]) - np.angle(w[:-1])
    return np.mod(theta, 2.0 * np.pi)
