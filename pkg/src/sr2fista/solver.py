"""Accelerated forward-backward iterations and the driver loop.

One SR2 strongly convex FISTA iteration from ``(x_k, v_k, A_k)``::

    A+  from the schedule (equality root)
    B+  = A+/(A+ - A) + (beta A+ + gamma A) / (2 (1 + m A))
    z   = x + ((A+ - A)/A+) (v - x)
    y+  = [(A/(A+ - A) + m A/(2(1 + m A))) x
           + beta (A+ - A)/(2(1 + m A)) z + v
           - (A+ - A)/(2(1 + m A)) grad g(z)] / B+
    x+  = prox_{eta h}(y+),   eta = (A+ - A) / (2 (1 + m A) B+)
    v+  = x+ + (A/(A+ - A)) (x+ - x)

With ``h = 0`` and ``beta = gamma = 0`` the first iteration is a plain
gradient step of length ``1/alpha``.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional

import numpy as np

from . import schedule
from ._validation import check_point, check_scalar
from .diagnostics import lyapunov_discrete
from .exceptions import (ArgumentError, BacktrackingError, DivergenceError,
                         InvariantViolation, SR2Error)
from .schedule import ScheduleParams

logger = logging.getLogger(__name__)

BETA_MODES = ("compromised", "plain")
ALGORITHMS = ("sr2fista", "ista")
MAX_BACKTRACKING_L = 1e15


class ScheduleSaturated(Exception):
    """Raised by a step when ``A_{k+1}`` overflows; a clean stop, not an error."""


@dataclass(frozen=True)
class Backtracking:
    initial_L: float
    increase_factor: float = 2.0

    def __post_init__(self):
        check_scalar(self.initial_L, "initial_L", lower=0.0, lower_inclusive=False)
        check_scalar(self.increase_factor, "increase_factor", lower=1.0,
                     lower_inclusive=False)

    @classmethod
    def parse(cls, text):
        """Parse ``"L0,FACTOR"`` (factor optional)."""
        parts = [s.strip() for s in str(text).split(",")]
        if not 1 <= len(parts) <= 2:
            raise ArgumentError(f"expected 'L0,FACTOR', got {text!r}")
        try:
            values = [float(s) for s in parts]
        except ValueError:
            raise ArgumentError(f"expected 'L0,FACTOR', got {text!r}") from None
        return cls(*values)


@dataclass(frozen=True)
class SolverConfig:
    beta_mode: str = "compromised"
    max_iters: int = 1000
    target_gap: Optional[float] = None
    backtracking: Optional[Backtracking] = None
    trace_every: int = 1

    def __post_init__(self):
        if self.beta_mode not in BETA_MODES:
            raise ArgumentError(f"beta_mode must be one of {BETA_MODES}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ArgumentError("max_iters must be a nonnegative integer")
        if int(self.trace_every) != self.trace_every or self.trace_every < 1:
            raise ArgumentError("trace_every must be a positive integer")
        if self.target_gap is not None:
            check_scalar(self.target_gap, "target_gap", lower=0.0)


@dataclass(frozen=True)
class StepInfo:
    """Transient quantities of the step that produced the current iterate.

    ``residual`` is the relative residual of the schedule equality.
    """

    A_prev: float
    z: np.ndarray
    grad_z: np.ndarray
    y: np.ndarray
    eta: float
    params: Optional[ScheduleParams]
    residual: float
    retries: int = 0


@dataclass(frozen=True)
class SolverState:
    k: int
    x: np.ndarray
    v: np.ndarray
    A: float = 0.0
    L_current: float = math.nan
    last: Optional[StepInfo] = None


def initial_state(x0, L=math.nan):
    x0 = np.array(x0, dtype=np.float64)
    return SolverState(0, x0, x0.copy(), 0.0, float(L))


def _check_finite(x, what):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"{what} became non-finite")


def sr2fista_step(state, p, cfg, sp):
    """One iteration of the accelerated method with schedule params ``sp``."""
    x, v, A = state.x, state.v, state.A
    sched = schedule.schedule_step(A, sp)
    A_next = sched.A_next
    if not math.isfinite(A_next):
        raise ScheduleSaturated(f"A overflowed after k={state.k}")
    dA = A_next - A
    if dA < 0.5 / (sp.alpha - sp.beta):
        raise InvariantViolation(f"schedule increment {dA} below 1/(2(alpha - beta))")
    w = schedule.step_weights(A, A_next, sp)

    z = x + w.theta * (v - x)
    grad_z = np.asarray(p.smooth.gradient(z), dtype=np.float64)
    y = ((w.a_over_d + w.ma_half) * x + (sp.beta * w.d_half) * z + v
         - w.d_half * grad_z) / sched.B_next
    eta = sched.eta_next
    x_next = np.asarray(p.nonsmooth.prox(y, eta), dtype=np.float64)
    v_next = x_next + (A / dA) * (x_next - x)
    _check_finite(x_next, "x")
    _check_finite(v_next, "v")
    info = StepInfo(A, z, grad_z, y, eta, sp, schedule.relative_residual(A, A_next, sp))
    return SolverState(state.k + 1, x_next, v_next, A_next, state.L_current, info)


def ista_step(state, p, eta):
    """Forward-backward step ``x+ = prox_{eta h}(x - eta grad g(x))``."""
    x = state.x
    grad = np.asarray(p.smooth.gradient(x), dtype=np.float64)
    y = x - eta * grad
    x_next = np.asarray(p.nonsmooth.prox(y, eta), dtype=np.float64)
    _check_finite(x_next, "x")
    info = StepInfo(0.0, x, grad, y, eta, None, math.nan)
    return SolverState(state.k + 1, x_next, x_next, 0.0, state.L_current, info)


def _smoothness_holds(p, x_next, z, grad_z, L):
    d = x_next - z
    g = p.smooth
    if g.terms is not None:
        tx, tz = g.terms(x_next), g.terms(z)
        lhs = float(np.sum(tx - tz))
        scale = float(np.sum(np.abs(tx)) + np.sum(np.abs(tz)))
    else:
        gx, gz = float(g.value(x_next)), float(g.value(z))
        lhs, scale = gx - gz, abs(gx) + abs(gz)
    rhs = float(grad_z @ d) + 0.5 * L * float(d @ d)
    # allowance for roundoff in the two function values only
    return lhs <= rhs + 8 * np.finfo(float).eps * scale


def _params_for(p, cfg, L):
    return ScheduleParams.from_constants(
        L, p.smooth.strong_mu, p.nonsmooth.strong_mu, cfg.beta_mode)


def sr2fista_backtracking_step(state, p, cfg, sp=None):
    """Accelerated step with an increase-only estimate of ``L_g``.

    The candidate ``L`` starts at ``state.L_current`` and is multiplied by
    the increase factor until ``g(x+) - g(z) <= <grad g(z), x+ - z> +
    (L/2)||x+ - z||^2`` holds at the produced point.  ``beta`` is recomputed
    from the candidate ``L`` in compromised mode.  ``sp`` is ignored; it is
    accepted for signature parity with :func:`sr2fista_step`.
    """
    bt = cfg.backtracking
    if bt is None:
        raise ArgumentError("backtracking is not enabled in the config")
    L = state.L_current if math.isfinite(state.L_current) else bt.initial_L
    retries = 0
    while True:
        if L > MAX_BACKTRACKING_L:
            raise BacktrackingError(f"Lipschitz estimate exceeded {MAX_BACKTRACKING_L:g}")
        try:
            params = _params_for(p, cfg, L)
        except ArgumentError:
            # L below mu_g: the schedule is undefined, grow L
            L *= bt.increase_factor
            retries += 1
            continue
        trial = sr2fista_step(state, p, cfg, params)
        info = trial.last
        if _smoothness_holds(p, trial.x, info.z, info.grad_z, L):
            return replace(trial, L_current=L, last=replace(info, retries=retries))
        L *= bt.increase_factor
        retries += 1


class TraceRecord(NamedTuple):
    k: int
    f_gap: float
    lyapunov: float
    schedule_residual: float
    eta: float
    bound_sublinear: float
    bound_linear: float
    A: float = math.nan
    L: float = math.nan


TRACE_COLUMNS = TraceRecord._fields[:7]


class StepLog(NamedTuple):
    A_prev: float
    A: float
    params: Optional[ScheduleParams]
    eta: float


@dataclass
class SolveResult:
    state: SolverState
    trace: List[TraceRecord]
    stop_reason: str
    steps: List[StepLog] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (state, trace)
        return iter((self.state, self.trace))


class _Recorder:
    def __init__(self, p, x0):
        self.p = p
        self.known = p.optimum is not None
        L, mu = p.smooth.lipschitz_L, p.mu
        if self.known:
            self.dist0 = float(np.sum((x0 - p.optimum.x) ** 2))
            self.gap0 = p.gap(x0)
            denom = L + p.nonsmooth.strong_mu
            q = mu / denom if denom > 0 else 0.0
            self.rate = math.sqrt(2.0 * q)
        self.L = L

    def __call__(self, state):
        p, k = self.p, state.k
        info = state.last
        eta = info.eta if info is not None else math.nan
        res = math.nan
        if info is not None and info.params is not None:
            res = info.residual
        elif k == 0:
            res = 0.0
        if not self.known:
            return TraceRecord(k, p.f(state.x), math.nan, res, eta,
                               math.nan, math.nan, state.A, state.L_current)
        gap = p.gap(state.x)
        lyap = math.nan
        if k == 0:
            lyap = lyapunov_discrete(state.x, state.v, 0.0, p, None)
        elif info is not None and info.params is not None:
            lyap = lyapunov_discrete(state.x, state.v, state.A, p, info.params)
        sub = 2.0 * self.L * self.dist0 / k ** 2 if k > 0 else math.inf
        lin = math.exp(-self.rate * k) * self.gap0
        return TraceRecord(k, gap, lyap, res, eta, sub, lin, state.A,
                           state.L_current)


def solve(p, cfg, x0, algorithm="sr2fista", eta=None):
    """Run ``algorithm`` from ``x0`` and return a :class:`SolveResult`.

    Stops at ``cfg.max_iters``, when the traced gap drops to
    ``cfg.target_gap`` (checked first, at trace points only), or when the
    schedule overflows (``stop_reason == "saturated"``).  ``eta`` is the
    fixed ISTA step, ``1/L_g`` by default.
    """
    if algorithm not in ALGORITHMS:
        raise ArgumentError(f"algorithm must be one of {ALGORITHMS}")
    x0 = check_point(x0, p.dimension, "x0")
    if cfg.target_gap is not None and p.optimum is None:
        raise ArgumentError("target_gap requires a problem with known optimum")

    if algorithm == "ista":
        eta = 1.0 / p.smooth.lipschitz_L if eta is None else float(eta)
        check_scalar(eta, "eta", lower=0.0, lower_inclusive=False)
        step = lambda st: ista_step(st, p, eta)
        state = initial_state(x0)
    elif cfg.backtracking is not None:
        step = lambda st: sr2fista_backtracking_step(st, p, cfg)
        state = initial_state(x0, cfg.backtracking.initial_L)
    else:
        sp = ScheduleParams.from_problem(p, cfg.beta_mode)
        step = lambda st: sr2fista_step(st, p, cfg, sp)
        state = initial_state(x0, p.smooth.lipschitz_L)

    record = _Recorder(p, x0)
    trace = [record(state)]
    steps = []

    def reached(rec):
        return cfg.target_gap is not None and rec.f_gap <= cfg.target_gap

    if reached(trace[0]):
        return SolveResult(state, trace, "target_gap", steps)
    reason = "max_iters"
    while state.k < cfg.max_iters:
        try:
            new = step(state)
        except ScheduleSaturated as exc:
            logger.info("stopping: %s", exc)
            reason = "saturated"
            break
        except SR2Error as exc:
            exc.iteration = state.k
            exc.args = (f"iteration {state.k}: {exc}",)
            raise
        state = new
        info = state.last
        steps.append(StepLog(info.A_prev, state.A, info.params, info.eta))
        if state.k % cfg.trace_every == 0 or state.k == cfg.max_iters:
            trace.append(record(state))
            if reached(trace[-1]):
                reason = "target_gap"
                break
    if trace[-1].k != state.k:
        trace.append(record(state))
    return SolveResult(state, trace, reason, steps)
