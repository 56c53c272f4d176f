"""Zeroth-order optimizers: plain two-point SGD (mezo), cone-restricted
momentum sampling (conmezo), and momentum-as-update-direction (mezo_momentum).

Every step costs exactly two function evaluations.  Two memory strategies
produce the same trajectory:

* ``buffered`` - the direction draw is held in a scratch buffer (the oracle
  and convenience mode).
* ``seed_replay`` - only the scalar difference coefficient and the stream
  counter are kept; the direction is regenerated from the counter for every
  pass that needs it.  In gaussian mode this means 4 stream regenerations per
  mezo step, while conmezo parks the mixed direction in the momentum buffer
  and regenerates only twice (the buffer is algebraically recombined back into
  the momentum afterwards).  Sphere mode adds one counting pass per step to
  learn the raw draw's norm before scaling.

Both strategies run the identical elementwise update ops on the iterate with
identical folded scalars, so mezo and mezo_momentum trajectories match bitwise
across strategies; conmezo's momentum recombination reorders roundings at the
~1 ulp level (covered by the 1e-12 strategy-equality contract).  Reductions:
conmezo at theta == pi/2 matches mezo bitwise (the cone coefficients snap
exactly to (0, 1)), and mezo_momentum at beta == 0 routes its iterate update
through the same folded-scalar path as mezo, again bitwise.

The random draw is consumed at every step regardless of theta or fallbacks, so
the stream never shifts between configurations sharing a seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Optional

import numpy as np

from . import kernels
from .rng import RngStream
from .sampling import (AXIS_NORM_FLOOR, DIST_GAUSSIAN, DIST_SPHERE, DISTS,
                       HALF_PI, cone_coefficients)
from .estimator import Objective
from .vec import as_vector

OPT_MEZO = "mezo"
OPT_CONMEZO = "conmezo"
OPT_MEZO_MOMENTUM = "mezo_momentum"
OPTIMIZERS = (OPT_MEZO, OPT_CONMEZO, OPT_MEZO_MOMENTUM)

WARMUP_NONE = "none"
WARMUP_RAMP = "ramp"
WARMUPS = (WARMUP_NONE, WARMUP_RAMP)

MEM_BUFFERED = "buffered"
MEM_SEED_REPLAY = "seed_replay"
MEMORIES = (MEM_BUFFERED, MEM_SEED_REPLAY)


@dataclass
class ConeConfig:
    """All tunables of a run.

    ``theta`` and ``beta_final`` only matter for the optimizers that use them;
    mezo ignores both (its trajectory is identical for any value).
    """

    theta: float = 1.35
    beta_final: float = 0.99
    eta: float = 1e-3
    lam: float = 1e-3
    total_steps: int = 10_000
    dist: str = DIST_SPHERE
    warmup: str = WARMUP_NONE
    memory: str = MEM_BUFFERED

    def validate(self) -> "ConeConfig":
        if not 0.0 <= self.theta <= HALF_PI:
            raise ValueError(f"theta must be in [0, pi/2], got {self.theta}")
        if not 0.0 <= self.beta_final <= 1.0:
            raise ValueError(f"beta_final must be in [0, 1], got {self.beta_final}")
        if self.eta <= 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.lam <= 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.total_steps < 1:
            raise ValueError(f"total_steps must be >= 1, got {self.total_steps}")
        if self.dist not in DISTS:
            raise ValueError(f"dist must be one of {DISTS}, got {self.dist!r}")
        if self.warmup not in WARMUPS:
            raise ValueError(f"warmup must be one of {WARMUPS}, got {self.warmup!r}")
        if self.warmup == WARMUP_RAMP and self.beta_final < 0.1:
            raise ValueError("the warm-up schedule assumes beta_final >= 0.1")
        if self.memory not in MEMORIES:
            raise ValueError(f"memory must be one of {MEMORIES}, got {self.memory!r}")
        return self


def warmup_beta(t: int, total_steps: int, beta_final: float) -> float:
    """Piecewise momentum ramp: flat 0.1, smooth ease-in, then the plateau.

    Breakpoints are t1 = total_steps/100 and t2 = total_steps/10 (rounded).
    Continuous at t1; the small jump of (beta_final - 0.1)/729 at t2 is kept as
    designed rather than smoothed.
    """
    if beta_final < 0.1:
        raise ValueError("warm-up schedule assumes beta_final >= 0.1")
    if not 0 <= t <= total_steps:
        raise ValueError(f"t must be in [0, total_steps], got {t}")
    t1 = round(total_steps / 100)
    t2 = max(round(total_steps / 10), t1 + 1)
    if t <= t1:
        return 0.1
    if t <= t2:
        frac = (t - t1) / (t2 - t1)
        return beta_final - (beta_final - 0.1) / (1.0 + 8.0 * frac**1.8) ** 3
    return beta_final


def theta_star(cos2_rho: float, d: int) -> float:
    """Maximally exploitative cone angle: 0 when the momentum alignment beats
    (d+4)/d^2 (the squared-cosine level of a random direction), else pi/2.

    Diagnostic only; not wired into the optimizers.
    """
    return 0.0 if cos2_rho > (d + 4) / d**2 else HALF_PI


@dataclass
class StepReport:
    """Per-step byproducts: the difference coefficient, the midpoint objective
    (f(x+lam z) + f(x-lam z))/2, the step's beta, and ||z|| when it is
    available without extra stream passes (None otherwise)."""

    coef: float
    objective: float
    beta_t: Optional[float] = None
    z_norm: Optional[float] = None
    fallback: bool = False


@dataclass
class OptimizerState:
    """Iterate, momentum (when the optimizer has one), step counter, stream."""

    x: np.ndarray
    m: Optional[np.ndarray]
    t: int
    rng: RngStream
    gbuf: Optional[np.ndarray] = field(default=None, repr=False)
    zbuf: Optional[np.ndarray] = field(default=None, repr=False)


def init_state(optimizer: str, x0, cfg: ConeConfig, seed: int) -> OptimizerState:
    if optimizer not in OPTIMIZERS:
        raise ValueError(f"unknown optimizer {optimizer!r}; have {OPTIMIZERS}")
    cfg.validate()
    x = as_vector(x0).copy()
    d = x.shape[0]
    has_m = optimizer != OPT_MEZO
    m = np.zeros(d, dtype=np.float64) if has_m else None
    gbuf = zbuf = None
    if cfg.memory == MEM_BUFFERED:
        gbuf = np.empty(d, dtype=np.float64)
        if optimizer == OPT_CONMEZO:
            zbuf = np.empty(d, dtype=np.float64)
    return OptimizerState(x=x, m=m, t=0, rng=RngStream(seed), gbuf=gbuf, zbuf=zbuf)


def _step_core(kind: str, state: OptimizerState, f: Objective, cfg: ConeConfig) -> StepReport:
    K = kernels.active()
    x = state.x
    d = x.shape[0]
    rd = sqrt(d)
    lam = cfg.lam
    sphere = cfg.dist == DIST_SPHERE
    buffered = cfg.memory == MEM_BUFFERED
    seed = state.rng.seed
    c0 = state.rng.reserve_normals(d)
    has_m = kind != OPT_MEZO
    init_m = has_m and state.t == 0

    if kind == OPT_CONMEZO:
        ct, st = cone_coefficients(cfg.theta)
    else:
        ct, st = 0.0, 1.0
    if has_m and cfg.warmup == WARMUP_RAMP:
        beta_t = warmup_beta(state.t, cfg.total_steps, cfg.beta_final)
    else:
        # Reported for mezo too (it never uses it), so the logged column is total.
        beta_t = cfg.beta_final

    # Materialize/measure the raw draw as the mode requires.
    gnorm = None
    need_g = st != 0.0 or init_m
    if buffered:
        if need_g:
            while True:
                K.normal_fill(state.gbuf, seed, c0)
                gss = float(K.dot(state.gbuf, state.gbuf))
                if not sphere or gss > 0.0:
                    break
                c0 = state.rng.reserve_normals(d)
            gnorm = sqrt(gss)
    elif sphere and need_g:
        while True:
            gss = float(K.normal_sumsq(seed, c0, d))
            if gss > 0.0:
                break
            c0 = state.rng.reserve_normals(d)
        gnorm = sqrt(gss)

    if init_m:
        # m_0 <- u_0 (the first draw; unit norm in sphere mode).
        if buffered:
            state.m[:] = state.gbuf
        else:
            K.normal_fill(state.m, seed, c0)
        if sphere:
            K.scale(state.m, 1.0 / gnorm)

    # Effective mixing: eff_ct = 0 routes through the pure-stream path shared
    # with mezo (theta == pi/2 reduction, degenerate-axis fallback).
    fallback = False
    eff_ct = 0.0
    mnorm = None
    if kind == OPT_CONMEZO and ct != 0.0:
        mnorm = sqrt(float(K.dot(state.m, state.m)))
        if mnorm < AXIS_NORM_FLOOR:
            fallback = True
        else:
            eff_ct = ct
    eff_st = st if not fallback else 1.0
    if fallback and sphere and gnorm is None:
        gss = float(K.normal_sumsq(seed, c0, d))
        gnorm = sqrt(gss)

    if eff_st == 0.0:
        cb = 0.0
    elif sphere:
        cb = (rd * eff_st) / gnorm
    else:
        cb = eff_st

    # Direction container: raw stream (eff_ct == 0), a scratch buffer, or the
    # momentum buffer itself in seed-replay mode.
    if eff_ct == 0.0:
        dirbuf = None
    else:
        am = (rd * eff_ct) / mnorm
        dirbuf = state.zbuf if buffered else state.m
        if buffered:
            if cb == 0.0:
                dirbuf[:] = state.m
                K.scale(dirbuf, am)
            else:
                K.lincomb(dirbuf, am, state.m, cb, state.gbuf)
        else:
            K.scale(state.m, am)
            if cb != 0.0:
                K.normal_axpy(state.m, cb, seed, c0)

    def apply_stream(alpha: float) -> None:
        # x += alpha * raw stream (alpha carries all scalar folding)
        if buffered:
            K.axpy(x, alpha, state.gbuf)
        else:
            K.normal_axpy(x, alpha, seed, c0)

    # Perturb, evaluate twice, restore (same op order in both strategies).
    if dirbuf is None:
        p = lam * cb
        apply_stream(p)
        f_plus = f.checked_value(x)
        apply_stream(-2.0 * p)
        f_minus = f.checked_value(x)
        apply_stream(p)
    else:
        K.axpy(x, lam, dirbuf)
        f_plus = f.checked_value(x)
        K.axpy(x, -2.0 * lam, dirbuf)
        f_minus = f.checked_value(x)
        K.axpy(x, lam, dirbuf)

    coef = (f_plus - f_minus) / (2.0 * lam)
    a_upd = -(cfg.eta * coef)

    # Iterate update (g-style), deferred for mezo_momentum with beta > 0 which
    # steps along the updated momentum instead.
    momentum_style = kind == OPT_MEZO_MOMENTUM and beta_t != 0.0
    if not momentum_style:
        if dirbuf is None:
            apply_stream(a_upd * cb)
        else:
            K.axpy(x, a_upd, dirbuf)

    # Momentum update m <- beta_t m + (1 - beta_t) g.
    if has_m:
        q = (1.0 - beta_t) * coef
        if kind == OPT_CONMEZO and dirbuf is not None and not buffered:
            # The momentum buffer currently holds z; recombine
            # m_new = (beta/am + q) z - (beta/am) cb g without a third buffer.
            r = beta_t / am
            K.scale(state.m, r + q)
            if cb != 0.0 and r != 0.0:
                K.normal_axpy(state.m, -(r * cb), seed, c0)
        else:
            K.scale(state.m, beta_t)
            if dirbuf is None:
                if buffered:
                    K.axpy(state.m, q * cb, state.gbuf)
                else:
                    K.normal_axpy(state.m, q * cb, seed, c0)
            else:
                K.axpy(state.m, q, dirbuf)

    if momentum_style:
        K.axpy(x, -cfg.eta, state.m)

    # ||z|| where it costs nothing extra: buffered recomputes from buffers,
    # sphere-mode pure-stream directions have ||z|| = sqrt(d) by construction.
    z_norm = None
    if buffered:
        if dirbuf is None:
            z_norm = abs(cb) * gnorm if gnorm is not None else None
        else:
            z_norm = sqrt(float(K.dot(dirbuf, dirbuf)))
    elif sphere and dirbuf is None:
        z_norm = rd

    state.t += 1
    return StepReport(coef=coef, objective=0.5 * (f_plus + f_minus),
                      beta_t=beta_t, z_norm=z_norm, fallback=fallback)


def mezo_step(state: OptimizerState, f: Objective, cfg: ConeConfig) -> StepReport:
    """Two-point SGD step along an unbiased random direction."""
    return _step_core(OPT_MEZO, state, f, cfg)


def conmezo_step(state: OptimizerState, f: Objective, cfg: ConeConfig) -> StepReport:
    """Cone-sampled step: direction mixed from the momentum axis and a fresh draw;
    the estimate is computed once at the pre-update iterate and reused for both
    the iterate and momentum updates."""
    return _step_core(OPT_CONMEZO, state, f, cfg)


def mezo_momentum_step(state: OptimizerState, f: Objective, cfg: ConeConfig) -> StepReport:
    """Unbiased direction, but the iterate moves along the updated momentum."""
    return _step_core(OPT_MEZO_MOMENTUM, state, f, cfg)


_STEPS = {
    OPT_MEZO: mezo_step,
    OPT_CONMEZO: conmezo_step,
    OPT_MEZO_MOMENTUM: mezo_momentum_step,
}


def step(optimizer: str, state: OptimizerState, f: Objective, cfg: ConeConfig) -> StepReport:
    return _STEPS[optimizer](state, f, cfg)
