"""Step-size schedule of the accelerated method.

Everything is expressed through the scalar sequence ``A_k`` (``A_0 = 0``),
which is advanced by the larger root of

    (alpha - beta) (A+ - A)^2 = 2 (1 + m A) A+,      m = beta + gamma,

so that the Lyapunov decrease condition holds with equality.  ``A_k`` grows
like ``k^2 / (2 alpha)`` early on and geometrically afterwards; the optimality
gap decays like ``1 / A_k``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from ._validation import check_scalar
from .exceptions import ArgumentError, InvariantViolation, NumericError

_RADICAND_SLACK = 1e-14
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class ScheduleParams:
    """The triple ``(alpha, beta, gamma)``.

    ``alpha`` plays the role of ``L_g``, ``gamma`` of ``mu_h`` and ``beta`` is
    either ``mu_g`` ("plain") or ``mu_g - mu^2 / (4 L_g)`` ("compromised").
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        check_scalar(self.alpha, "alpha", lower=0.0, lower_inclusive=False)
        check_scalar(self.beta, "beta")
        check_scalar(self.gamma, "gamma")
        if not self.alpha > self.beta:
            raise ArgumentError(f"need alpha > beta, got {self.alpha} <= {self.beta}")
        if self.m < -1e-12:
            raise ArgumentError(f"need beta + gamma >= 0, got {self.m}")

    @property
    def m(self):
        return self.beta + self.gamma

    @classmethod
    def from_constants(cls, L, mu_g, mu_h, beta_mode="compromised"):
        mu = mu_g + mu_h
        if beta_mode == "compromised":
            beta = mu_g - mu * mu / (4.0 * L)
        elif beta_mode == "plain":
            beta = mu_g
        else:
            raise ArgumentError(f"unknown beta_mode {beta_mode!r}")
        return cls(float(L), float(beta), float(mu_h))

    @classmethod
    def from_problem(cls, p, beta_mode="compromised", L=None):
        L = p.smooth.lipschitz_L if L is None else L
        return cls.from_constants(L, p.smooth.strong_mu, p.nonsmooth.strong_mu,
                                  beta_mode)


class ScheduleState(NamedTuple):
    A: float
    A_next: float
    B_next: float
    eta_next: float


def advance_A(A, p):
    """Next schedule value (larger root of the equality condition)."""
    if A < 0:
        raise ArgumentError(f"A must be nonnegative, got {A}")
    a, b, g = p.alpha, p.beta, p.gamma
    # for A > 1 factor A out so that A^2 never overflows before A+ does
    s = 1.0 / A if A > 1.0 else 1.0
    t = 1.0 if A > 1.0 else A
    rad = (b + g) * (2 * a - b + g) * t * t + 2 * (a + g) * t * s + s * s
    if rad < 0:
        if rad < -_RADICAND_SLACK:
            raise NumericError(f"negative radicand {rad} in schedule update")
        rad = 0.0
    root = ((a + g) * t + s + math.sqrt(rad)) / (a - b)
    return A * root if A > 1.0 else root


class StepWeights(NamedTuple):
    """Coefficients of one iteration, all free of ``1 + m A`` overflow.

    ``theta = (A+ - A)/A+``, ``a_over_d = A/(A+ - A)``,
    ``ma_half = m A / (2(1 + m A))`` and ``d_half = (A+ - A)/(2(1 + m A))``.
    """

    theta: float
    a_over_d: float
    ma_half: float
    d_half: float


def _k_scaled(A, p):
    # 1 + m A = K / s, with s = 1/A once A > 1
    s = 1.0 / A if A > 1.0 else 1.0
    K = s + p.m * (A * s)
    if not K > 0:
        raise NumericError(f"1 + m A must be positive (A={A}, m={p.m})")
    return s, K


def step_weights(A, A_next, p):
    dA = A_next - A
    if not dA > 0:
        raise NumericError(f"schedule must increase, got A={A}, A_next={A_next}")
    s, K = _k_scaled(A, p)
    return StepWeights(dA / A_next, A / dA, p.m * (A * s) / (2.0 * K),
                       (dA * s) / (2.0 * K))


def compute_B(A, A_next, p):
    dA = A_next - A
    if not dA > 0:
        raise NumericError(f"schedule must increase, got A={A}, A_next={A_next}")
    s, K = _k_scaled(A, p)
    B = A_next / dA + (p.beta * (A_next * s) + p.gamma * (A * s)) / (2.0 * K)
    if not B > 0:
        raise NumericError(f"B = {B} must be positive")
    return B


def prox_step(A, A_next, B_next, p):
    """Effective prox step ``(A+ - A) / (2 (1 + m A) B+)``."""
    eta = step_weights(A, A_next, p).d_half / B_next
    if not eta > 0:
        raise NumericError(f"prox step {eta} must be positive")
    if p.gamma < 0 and not eta < -1.0 / p.gamma:
        raise InvariantViolation(
            f"prox step {eta} >= -1/gamma = {-1.0 / p.gamma}")
    return eta


def schedule_step(A, p):
    """Bundle ``A+``, ``B+`` and the prox step for one iteration."""
    A_next = advance_A(A, p)
    if not math.isfinite(A_next):
        return ScheduleState(A, A_next, math.nan, math.nan)
    if not 2.0 + p.m * (A + A_next) > 0:
        raise InvariantViolation("prox well-definedness 2 + m(A + A+) > 0 failed")
    B_next = compute_B(A, A_next, p)
    return ScheduleState(A, A_next, B_next, prox_step(A, A_next, B_next, p))


def residual(A, A_next, p):
    """Signed residual of the schedule condition (``<= 0`` is admissible)."""
    dA = A_next - A
    return (p.alpha - p.beta) * dA * dA - 2.0 * (1.0 + p.m * A) * A_next


def residual_scale(A_next, p):
    return max(1.0, (p.alpha - p.beta) * A_next * A_next)


def relative_residual(A, A_next, p):
    """``residual / residual_scale``, evaluated without overflow for huge ``A``."""
    c = p.alpha - p.beta
    if A_next <= 1.0 or c * A_next * A_next <= 1.0:
        return residual(A, A_next, p) / residual_scale(A_next, p)
    r = A / A_next
    d = 1.0 - r
    return d * d - 2.0 * (1.0 / A_next + p.m * r) / c


def sequence(p, n):
    """``[A_0, ..., A_n]`` starting from ``A_0 = 0``."""
    out = [0.0]
    for _ in range(n):
        out.append(advance_A(out[-1], p))
    return out


def rate_lower_bounds(p, k):
    """Return ``(k^2 / (2 alpha), rho)``.

    ``A_k >= k^2/(2 alpha)`` for all ``k`` and ``A_{k+1} >= rho A_k``, with
    ``rho = (1 + q2 + sqrt((q1 + q2)(2 - q1 + q2))) / (1 - q1)``,
    ``q1 = beta/alpha`` and ``q2 = gamma/alpha``.
    """
    if k < 0:
        raise ArgumentError("k must be nonnegative")
    q1, q2 = p.beta / p.alpha, p.gamma / p.alpha
    rad = max((q1 + q2) * (2.0 - q1 + q2), 0.0)
    rho = (1.0 + q2 + math.sqrt(rad)) / (1.0 - q1)
    return k * k / (2.0 * p.alpha), rho
