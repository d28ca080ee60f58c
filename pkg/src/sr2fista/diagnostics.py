"""Certificate checkers for the convergence inequalities of the method.

Certificates are post-hoc observers: they never alter or abort a run.
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from ._validation import check_random_state
from .exceptions import ArgumentError
from . import schedule

WDG_RTOL = 1e-9
LYAPUNOV_RTOL = 1e-9


@dataclass(frozen=True)
class Certificate:
    name: str
    passed: bool
    worst_violation: float
    location: Any = None
    tolerance: float = 0.0

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: worst violation {self.worst_violation:.3e}"
                f" (tol {self.tolerance:.3e}) at {self.location}")


def _sq(a):
    return float(np.dot(a, a))


def lyapunov_discrete(x, v, A, p, sp):
    """``A (f(x) - f* - (m/2)||x - x*||^2) + (1 + m A) ||v - x*||^2``.

    ``m = beta + gamma`` from ``sp``; ``sp`` may be ``None`` when ``A == 0``.
    """
    if p.optimum is None:
        raise ArgumentError("the Lyapunov function needs a known optimum")
    x_star = p.optimum.x
    dv = _sq(np.asarray(v) - x_star)
    if A == 0:
        return dv
    m = sp.m
    dx = _sq(np.asarray(x) - x_star)
    return A * (p.gap(x) - 0.5 * m * dx) + (1.0 + m * A) * dv


def check_lyapunov_monotone(values, ks=None, rtol=LYAPUNOV_RTOL, name="lyapunov_monotone"):
    """Non-increase of a Lyapunov sequence up to ``rtol * max(1, E_0)``."""
    vals = np.asarray(values, dtype=np.float64)
    ks = list(range(len(vals))) if ks is None else list(ks)
    tol = rtol * max(1.0, abs(vals[0])) if len(vals) else 0.0
    if len(vals) < 2:
        return Certificate(name, True, 0.0, None, tol)
    inc = np.diff(vals)
    i = int(np.argmax(inc))
    worst = max(float(inc[i]), 0.0)
    return Certificate(name, bool(worst <= tol), worst, ks[i + 1], tol)


def wdg_violation(p, x, y, z, u, abg=None):
    """Return ``(violation, scale)`` of the weak discrete gradient inequality.

    ``f(y) - f(x) <= <grad g(z) + u, y - x> + (alpha/2)||y - z||^2
    - (beta/2)||z - x||^2 - (gamma/2)||y - x||^2`` with ``u`` in the
    subdifferential of ``h`` at ``y``.  ``abg`` defaults to
    ``(L_g, mu_g, mu_h)``.
    """
    if abg is None:
        alpha, beta, gamma = (p.smooth.lipschitz_L, p.smooth.strong_mu,
                              p.nonsmooth.strong_mu)
    elif isinstance(abg, schedule.ScheduleParams):
        alpha, beta, gamma = abg.alpha, abg.beta, abg.gamma
    else:
        alpha, beta, gamma = abg
    x, y, z, u = (np.asarray(a, dtype=np.float64) for a in (x, y, z, u))
    lhs = p.f_diff(y, x)
    pieces = (float((p.smooth.gradient(z) + u) @ (y - x)),
              0.5 * alpha * _sq(y - z),
              -0.5 * beta * _sq(z - x),
              -0.5 * gamma * _sq(y - x))
    rhs = math.fsum(pieces)
    scale = 1.0 + sum(abs(t) for t in pieces)
    for val in (p.f(x), p.f(y)):
        if math.isfinite(val):
            scale += abs(val)
    if math.isnan(lhs):
        return 0.0, scale
    return max(0.0, lhs - rhs), scale


def check_wdg(p, x, y, z, u, abg=None, rtol=WDG_RTOL):
    viol, scale = wdg_violation(p, x, y, z, u, abg)
    tol = rtol * scale
    return Certificate("wdg", bool(viol <= tol), viol, None, tol)


def sample_wdg_triples(p, n, seed=0, spread=None):
    """Yield ``(x, y, z, u)`` with ``u = (w - y)/eta`` recovered from a prox call.

    Even samples are dense: ``x``, ``z``, ``w`` Gaussian around ``x*`` (or
    the origin) with standard deviation ``spread`` (default 5).  Odd samples
    perturb only 1 to 3 random coordinates and put ``z`` close to ``y``;
    these probe the low-curvature directions that dense samples average out.
    """
    rng = check_random_state(seed)
    d = p.dimension
    center = p.optimum.x if p.optimum is not None else np.zeros(d)
    spread = 5.0 if spread is None else spread
    max_eta = min(p.nonsmooth.max_step(), 1.0)
    for i in range(n):
        eta = rng.uniform(0.05, 0.95) * max_eta
        if i % 2 == 0:
            x = center + spread * rng.standard_normal(d)
            z = center + spread * rng.standard_normal(d)
            w = center + spread * rng.standard_normal(d)
            y = np.asarray(p.nonsmooth.prox(w, eta), dtype=np.float64)
        else:
            idx = rng.choice(d, size=min(d, int(rng.integers(1, 4))), replace=False)
            x, w = center.copy(), center.copy()
            x[idx] += spread * rng.standard_normal(idx.size)
            w[idx] += spread * rng.standard_normal(idx.size)
            y = np.asarray(p.nonsmooth.prox(w, eta), dtype=np.float64)
            z = y.copy()
            z[idx] += 0.01 * spread * rng.standard_normal(idx.size)
        u = (w - y) / eta
        yield x, y, z, u


def check_wdg_samples(p, n=1000, seed=0, abg=None, rtol=WDG_RTOL, spread=None):
    """Run :func:`check_wdg` on ``n`` sampled triples; report the worst one.

    The reported violation is relative (divided by each sample's scale).
    """
    worst, where = 0.0, None
    failures = 0
    for i, (x, y, z, u) in enumerate(sample_wdg_triples(p, n, seed, spread)):
        viol, scale = wdg_violation(p, x, y, z, u, abg)
        rel = viol / scale
        if rel > rtol:
            failures += 1
        if rel > worst or where is None:
            worst, where = rel, i
    return Certificate(f"wdg_samples[{failures}/{n} failed]", failures == 0,
                       worst, where, rtol)


def appendix_rate_margin(q):
    """LHS - RHS of the rate comparison for ``0 < q <= 1``."""
    q1 = q - q * q / 4.0
    lhs = (1.0 + math.sqrt(2.0 * q1 - q1 * q1)) / (1.0 - q1)
    rhs = 1.0 + math.sqrt(2.0 * q) + q
    return lhs - rhs


def check_appendix_rate(q_grid):
    """Strict positivity of :func:`appendix_rate_margin` on ``q_grid``.

    ``worst_violation`` is ``-min margin`` (negative when all margins are
    positive); the smallest margin's ``q`` is the location.
    """
    q_grid = [float(q) for q in q_grid]
    if not q_grid or any(not 0.0 < q <= 1.0 for q in q_grid):
        raise ArgumentError("q values must lie in (0, 1]")
    margins = [appendix_rate_margin(q) for q in q_grid]
    i = int(np.argmin(margins))
    return Certificate("appendix_rate", margins[i] > 0, -margins[i], q_grid[i], 0.0)


def check_schedule_condition(A_seq, sp, equality=True, rtol=schedule.RESIDUAL_RTOL):
    """Residual of the schedule condition on consecutive pairs of ``A_seq``.

    ``sp`` is one :class:`ScheduleParams` or a sequence with one entry per
    step.  With ``equality`` the absolute residual is checked, otherwise only
    its positive part.
    """
    A_seq = [float(a) for a in A_seq]
    n = len(A_seq) - 1
    params = [sp] * n if isinstance(sp, schedule.ScheduleParams) else list(sp)
    if len(params) != n:
        raise ArgumentError("need one ScheduleParams per step")
    worst, where = 0.0, None
    for k in range(n):
        r = schedule.relative_residual(A_seq[k], A_seq[k + 1], params[k])
        viol = abs(r) if equality else max(r, 0.0)
        if viol > worst or where is None:
            worst, where = viol, k
    name = "schedule_equality" if equality else "schedule_inequality"
    return Certificate(name, worst <= rtol, worst, where, rtol)


def check_prox_well_defined(A_seq, sp, etas=None):
    """``2 + m (A_k + A_{k+1}) > 0`` and, for ``gamma < 0``,
    ``eta_{k+1} < -1/gamma`` at every step.

    ``worst_violation`` is the negated smallest slack.
    """
    A_seq = [float(a) for a in A_seq]
    n = len(A_seq) - 1
    params = [sp] * n if isinstance(sp, schedule.ScheduleParams) else list(sp)
    worst, where = -math.inf, None
    for k in range(n):
        prm = params[k]
        slack = 2.0 + prm.m * (A_seq[k] + A_seq[k + 1])
        if etas is not None and prm.gamma < 0:
            slack = min(slack, -1.0 / prm.gamma - etas[k])
        if -slack > worst:
            worst, where = -slack, k
    if where is None:
        worst = 0.0
    return Certificate("prox_well_defined", worst < 0 or n == 0, worst, where, 0.0)


def momentum_identity_residual(x, x_next, z, A, A_next):
    """LHS - RHS of the three-point identity behind the Lyapunov decrease.

    With ``v+ = x+ + (A/(A+ - A))(x+ - x)``::

        (A+ - A)/2 (||v+ - x+||^2 - ||v+ - z||^2)
            + A/2 (||x+ - x||^2 - ||z - x||^2) = -A+/2 ||x+ - z||^2
    """
    x, x_next, z = (np.asarray(a, dtype=np.float64) for a in (x, x_next, z))
    dA = A_next - A
    v_next = x_next + (A / dA) * (x_next - x)
    lhs = (0.5 * dA * (_sq(v_next - x_next) - _sq(v_next - z))
           + 0.5 * A * (_sq(x_next - x) - _sq(z - x)))
    return lhs + 0.5 * A_next * _sq(x_next - z)
