"""Composite problem model ``f = g + h``.

A problem bundles a smooth part ``g`` (value and gradient oracles, with
Lipschitz constant ``L_g`` and strong convexity modulus ``mu_g``) and a
prox-friendly part ``h`` (value and proximal oracles, with modulus
``mu_h``).  Either modulus may be negative as long as ``mu_g + mu_h >= 0``.

Oracles may optionally expose ``terms``: the per-coordinate contributions
of a separable function.  When both parts are separable, optimality gaps are
computed as sums of termwise differences, which keeps ``f(x) - f*`` accurate
to relative machine precision even when ``f*`` is large.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from ._validation import check_point, check_random_state, check_scalar
from .exceptions import ArgumentError, IllPosedProxError

_MU_SLACK = 1e-12


@dataclass(frozen=True)
class SmoothOracle:
    """Smooth part ``g`` with ``L_g``-Lipschitz gradient.

    ``strong_mu`` may be negative (weak convexity).  ``terms`` returns the
    per-coordinate summands of a separable ``g``; ``diff(x, ref)`` returns
    ``g(x) - g(ref)`` (per coordinate, or as a scalar) computed without
    cancellation.  Both are optional and only sharpen gap evaluation.
    """

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float
    strong_mu: float
    terms: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "g"
    diff: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        check_scalar(self.lipschitz_L, "lipschitz_L", lower=0.0,
                     lower_inclusive=False)
        check_scalar(self.strong_mu, "strong_mu")
        if self.strong_mu > self.lipschitz_L:
            raise ArgumentError(
                f"strong_mu={self.strong_mu} exceeds lipschitz_L={self.lipschitz_L}")


@dataclass(frozen=True)
class ProxOracle:
    """Prox-friendly part ``h``; ``prox(x, eta)`` returns ``prox_{eta h}(x)``.

    When ``strong_mu < 0`` callers must keep ``eta < -1/strong_mu``.
    ``terms`` and ``diff`` are as for :class:`SmoothOracle`.
    """

    value: Callable[[np.ndarray], float]
    prox: Callable[[np.ndarray, float], np.ndarray]
    strong_mu: float = 0.0
    terms: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "h"
    diff: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        check_scalar(self.strong_mu, "strong_mu")

    def max_step(self):
        """Largest admissible prox step (exclusive); ``inf`` if unbounded."""
        if self.strong_mu < 0:
            return -1.0 / self.strong_mu
        return np.inf


class Optimum(NamedTuple):
    x: np.ndarray
    f: float


@dataclass(frozen=True)
class ProblemSpec:
    smooth: SmoothOracle
    nonsmooth: ProxOracle
    dimension: int
    optimum: Optional[Optimum] = field(default=None)

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ArgumentError(f"dimension must be a positive integer, got {self.dimension}")
        scale = max(1.0, abs(self.smooth.strong_mu), abs(self.nonsmooth.strong_mu))
        if self.mu < -_MU_SLACK * scale:
            raise ArgumentError(
                f"mu_g + mu_h = {self.mu} < 0: the objective is not convex")
        if self.optimum is not None:
            x_star = check_point(self.optimum.x, self.dimension, "x_star")
            f_star = float(self.optimum.f)
            object.__setattr__(self, "optimum", Optimum(x_star, f_star))
            f_at = self.f(x_star)
            if not abs(f_at - f_star) <= 1e-10 * max(1.0, abs(f_star)):
                raise ArgumentError(
                    f"f(x_star) = {f_at!r} does not match f_star = {f_star!r}")

    @property
    def mu(self):
        """Strong convexity modulus of ``f``: ``mu_g + mu_h``."""
        return self.smooth.strong_mu + self.nonsmooth.strong_mu

    @property
    def separable(self):
        return self.smooth.terms is not None and self.nonsmooth.terms is not None

    def f(self, x):
        return evaluate_f(self, x)

    def f_diff(self, y, x):
        """``f(y) - f(x)``.

        Uses the oracles' ``diff`` when both provide one (summed coordinatewise
        so that first-order parts of ``g`` and ``h`` cancel before the sum),
        else termwise differences for separable problems, else plain values.
        """
        if self.smooth.diff is not None and self.nonsmooth.diff is not None:
            dg = np.asarray(self.smooth.diff(y, x), dtype=np.float64)
            dh = np.asarray(self.nonsmooth.diff(y, x), dtype=np.float64)
            with np.errstate(invalid="ignore"):
                if dg.ndim and dh.ndim:
                    return float(np.sum(dg + dh))
                return float(np.sum(dg)) + float(np.sum(dh))
        if self.separable:
            dg = self.smooth.terms(y) - self.smooth.terms(x)
            dh = self.nonsmooth.terms(y) - self.nonsmooth.terms(x)
            with np.errstate(invalid="ignore"):
                return float(np.sum(dg) + np.sum(dh))
        return self.f(y) - self.f(x)

    def gap(self, x):
        """``f(x) - f*``; requires a known optimum."""
        if self.optimum is None:
            raise ArgumentError("problem has no known optimum")
        x = check_point(x, self.dimension)
        if self.separable or (self.smooth.diff is not None
                              and self.nonsmooth.diff is not None):
            return self.f_diff(x, self.optimum.x)
        return self.f(x) - self.optimum.f


def evaluate_f(p, x):
    """Return ``g(x) + h(x)``; ``+inf`` when ``x`` is outside ``dom h``."""
    x = check_point(x, p.dimension)
    hx = float(p.nonsmooth.value(x))
    if np.isinf(hx) and hx > 0:
        return np.inf
    return float(p.smooth.value(x)) + hx


def zero_regularizer():
    """``h = 0``; its prox is the identity."""
    return ProxOracle(
        value=lambda x: 0.0,
        prox=lambda x, eta: np.array(x, dtype=np.float64, copy=True),
        strong_mu=0.0,
        terms=lambda x: np.zeros_like(x, dtype=np.float64),
        name="zero",
        diff=lambda x, ref: np.zeros_like(x, dtype=np.float64),
    )


def diagonal_quadratic(weights, centers, strong_mu=None):
    """``g(x) = 1/2 sum_i w_i (x_i - c_i)^2`` with ``w_i >= 0``.

    ``L_g = max w`` and ``mu_g = min w`` unless ``strong_mu`` overrides the
    latter (any lower bound on ``min w`` is valid).
    """
    w = check_point(weights, name="weights")
    c = check_point(centers, w.shape[0], name="centers")
    if np.any(w < 0):
        raise ArgumentError("diagonal quadratic weights must be nonnegative")
    if not np.any(w > 0):
        raise ArgumentError("at least one weight must be positive")
    mu = float(w.min()) if strong_mu is None else float(strong_mu)

    def terms(x):
        r = x - c
        return 0.5 * w * r * r

    return SmoothOracle(
        value=lambda x: float(np.sum(terms(x))),
        gradient=lambda x: w * (x - c),
        lipschitz_L=float(w.max()),
        strong_mu=mu,
        terms=terms,
        name="diagonal_quadratic",
        diff=lambda x, ref: 0.5 * w * (x - ref) * ((x - c) + (ref - c)),
    )


def quadratic(Q, center):
    """Dense ``g(x) = 1/2 (x - c)^T Q (x - c)`` with symmetric PSD ``Q``."""
    Q = np.asarray(Q, dtype=np.float64)
    c = check_point(center, name="center")
    if Q.shape != (c.shape[0], c.shape[0]):
        raise ArgumentError(f"Q has shape {Q.shape}, expected square of size {c.shape[0]}")
    if not np.allclose(Q, Q.T, rtol=1e-12, atol=1e-14):
        raise ArgumentError("Q must be symmetric")
    eig = np.linalg.eigvalsh(Q)
    if eig[0] < -1e-12 * max(1.0, eig[-1]):
        raise ArgumentError("Q must be positive semidefinite")

    def value(x):
        r = x - c
        return 0.5 * float(r @ (Q @ r))

    return SmoothOracle(
        value=value,
        gradient=lambda x: Q @ (x - c),
        lipschitz_L=float(eig[-1]),
        strong_mu=max(float(eig[0]), 0.0),
        name="quadratic",
        diff=lambda x, ref: 0.5 * float((x - ref) @ (Q @ ((x - c) + (ref - c)))),
    )


def reformulate_convex(p):
    """Move ``(mu_h/2)||x||^2`` from ``h`` to ``g``.

    The result has ``g_hat = g + (mu_h/2)||x||^2`` and
    ``h_hat = h - (mu_h/2)||x||^2`` with ``mu(h_hat) = 0``; the prox of
    ``h_hat`` is evaluated through the shifted identity
    ``prox_{eta h_hat}(y) = prox_{eta/s h}(y/s)`` with ``s = 1 - mu_h eta``.
    """
    mu_h = p.nonsmooth.strong_mu
    if mu_h == 0:
        return p
    g, h = p.smooth, p.nonsmooth

    def g_value(x):
        return float(g.value(x)) + 0.5 * mu_h * float(x @ x)

    def g_grad(x):
        return g.gradient(x) + mu_h * x

    g_terms = None
    if g.terms is not None:
        def g_terms(x):
            return g.terms(x) + 0.5 * mu_h * x * x

    def h_value(x):
        return float(h.value(x)) - 0.5 * mu_h * float(x @ x)

    def h_prox(y, eta):
        s = 1.0 - mu_h * eta
        if s <= 0:
            raise IllPosedProxError(
                f"shifted prox needs 1 - mu_h*eta > 0, got {s} (eta={eta})")
        return h.prox(np.asarray(y, dtype=np.float64) / s, eta / s)

    h_terms = None
    if h.terms is not None:
        def h_terms(x):
            return h.terms(x) - 0.5 * mu_h * x * x

    def shift_diff(x, ref):
        return 0.5 * mu_h * (x - ref) * (x + ref)

    g_diff = h_diff = None
    if g.diff is not None and h.diff is not None:
        def g_diff(x, ref):
            d = np.asarray(g.diff(x, ref), dtype=np.float64)
            shift = shift_diff(x, ref)
            return d + shift if d.ndim else float(d) + float(np.sum(shift))

        def h_diff(x, ref):
            return h.diff(x, ref) - shift_diff(x, ref)

    smooth = SmoothOracle(g_value, g_grad, g.lipschitz_L + mu_h,
                          g.strong_mu + mu_h, g_terms, name=g.name + "_hat",
                          diff=g_diff)
    nonsmooth = ProxOracle(h_value, h_prox, 0.0, h_terms, name=h.name + "_hat",
                           diff=h_diff)
    optimum = None
    if p.optimum is not None:
        # the objective is unchanged pointwise; re-evaluate f* for roundoff
        x_star = p.optimum.x
        optimum = Optimum(x_star, g_value(x_star) + h_value(x_star))
    return ProblemSpec(smooth, nonsmooth, p.dimension, optimum)


class GradientCheck(NamedTuple):
    max_deviation: float
    worst_sample: int


def check_gradient(p, samples=3, seed=0):
    """Compare the analytic gradient of ``g`` with central differences.

    Points are drawn uniformly from ``[-1, 1]^d``.  The deviation of a sample
    is ``||fd - grad||_inf / max(1, ||fd||_inf)`` with perturbation
    ``1e-6 (1 + ||x||)``; the report carries the largest one.
    """
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    rng = check_random_state(seed)
    d = p.dimension
    worst, worst_i = 0.0, 0
    for i in range(samples):
        x = rng.uniform(-1.0, 1.0, size=d)
        step = 1e-6 * (1.0 + np.linalg.norm(x))
        analytic = np.asarray(p.smooth.gradient(x), dtype=np.float64)
        fd = np.empty(d)
        xp = x.copy()
        for j in range(d):
            xp[j] = x[j] + step
            up = p.smooth.value(xp)
            xp[j] = x[j] - step
            down = p.smooth.value(xp)
            xp[j] = x[j]
            fd[j] = (up - down) / (2.0 * step)
        dev = np.max(np.abs(fd - analytic)) / max(1.0, np.max(np.abs(fd)))
        if dev > worst:
            worst, worst_i = float(dev), i
    return GradientCheck(worst, worst_i)
