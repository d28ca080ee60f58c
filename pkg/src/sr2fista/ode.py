"""Continuous-time model of the method and its Lyapunov function.

First-order system, for ``0 < mu_tilde <= mu``::

    dx/dt = 2 sqrt(mu_tilde) coth(sqrt(mu_tilde) t) (v - x)
    dv/dt = tanh(sqrt(mu_tilde) t) / sqrt(mu_tilde) (mu_tilde (x - v) - grad f(x))

with ``x(0) = v(0) = x0``.  For ``mu_tilde -> 0`` the coefficients become
``2/t`` and ``t``.  Only smooth objectives (``h = 0``) are supported.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_point, check_scalar
from .exceptions import ArgumentError, DivergenceError

SMALL_MU = 1e-12


@dataclass(frozen=True)
class OdeState:
    t: float
    x: np.ndarray
    v: np.ndarray


def _coefficients(t, mu_tilde):
    if mu_tilde < SMALL_MU:
        return 2.0 / t, t
    r = math.sqrt(mu_tilde)
    s = r * t
    return 2.0 * r / math.tanh(s), math.tanh(s) / r


def item_rhs(s, mu_tilde, grad_f):
    """Return ``(dx, dv)`` at state ``s``; requires ``s.t > 0``."""
    if not s.t > 0:
        raise ArgumentError(f"the vector field is singular at t = {s.t}")
    cx, cv = _coefficients(s.t, mu_tilde)
    dx = cx * (s.v - s.x)
    dv = cv * (mu_tilde * (s.x - s.v) - grad_f(s.x))
    return dx, dv


def lyapunov_continuous(s, p, mu_tilde):
    """``sinh^2(r t)/mu_tilde (f - f* - mu_tilde/2 ||x - x*||^2)
    + cosh^2(r t) ||v - x*||^2`` with ``r = sqrt(mu_tilde)``."""
    if p.optimum is None:
        raise ArgumentError("the Lyapunov function needs a known optimum")
    x_star = p.optimum.x
    dx = s.x - x_star
    dv = s.v - x_star
    gap = p.gap(s.x)
    if mu_tilde < SMALL_MU:
        return s.t ** 2 * gap + float(dv @ dv)
    r = math.sqrt(mu_tilde)
    sh2 = math.sinh(r * s.t) ** 2
    ch2 = 1.0 + sh2
    return sh2 / mu_tilde * (gap - 0.5 * mu_tilde * float(dx @ dx)) + ch2 * float(dv @ dv)


class Trajectory(NamedTuple):
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    lyapunov: np.ndarray
    f_gap: np.ndarray


def integrate(p, mu_tilde, t_end, steps, x0, sample_every=1):
    """Fixed-step RK4 on ``(0, t_end]``.

    The first step ``t0 = t_end/steps`` is taken from the series solution
    ``x ~ x0 - (t^2/4) grad f(x0)``, ``v ~ x0 - (t^2/2) grad f(x0)`` to stay
    clear of the ``coth`` singularity; the returned samples include
    ``t = 0``.  ``lyapunov`` and ``f_gap`` are NaN without a known optimum.
    """
    if p.nonsmooth.name != "zero":
        raise ArgumentError("the ODE model needs a smooth objective (h = 0)")
    mu_tilde = check_scalar(mu_tilde, "mu_tilde", lower=0.0)
    if mu_tilde > p.mu * (1 + 1e-12):
        raise ArgumentError(f"mu_tilde = {mu_tilde} exceeds mu = {p.mu}")
    t_end = check_scalar(t_end, "t_end", lower=0.0, lower_inclusive=False)
    if int(steps) != steps or steps < 1:
        raise ArgumentError("steps must be a positive integer")
    x0 = check_point(x0, p.dimension, "x0")
    grad = p.smooth.gradient
    h = t_end / steps
    known = p.optimum is not None

    def rhs(t, x, v):
        return item_rhs(OdeState(t, x, v), mu_tilde, grad)

    def sample(t, x, v):
        ts.append(t)
        xs.append(x.copy())
        vs.append(v.copy())
        if known:
            st = OdeState(t, x, v)
            es.append(lyapunov_continuous(st, p, mu_tilde))
            gs.append(p.gap(x))
        else:
            es.append(math.nan)
            gs.append(math.nan)

    ts, xs, vs, es, gs = [], [], [], [], []
    sample(0.0, x0, x0)
    g0 = grad(x0)
    x = x0 - 0.25 * h * h * g0
    v = x0 - 0.5 * h * h * g0
    t = h
    if sample_every == 1 or steps == 1:
        sample(t, x, v)
    for i in range(1, steps):
        k1x, k1v = rhs(t, x, v)
        k2x, k2v = rhs(t + h / 2, x + h / 2 * k1x, v + h / 2 * k1v)
        k3x, k3v = rhs(t + h / 2, x + h / 2 * k2x, v + h / 2 * k2v)
        k4x, k4v = rhs(t + h, x + h * k3x, v + h * k3v)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        t = (i + 1) * h
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise DivergenceError(f"ODE state became non-finite at t = {t}")
        if (i + 1) % sample_every == 0 or i + 1 == steps:
            sample(t, x, v)
    return Trajectory(np.array(ts), np.array(xs), np.array(vs),
                      np.array(es), np.array(gs))
