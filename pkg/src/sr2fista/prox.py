"""Closed-form proximal operators for separable regularizers.

``prox_{eta h}(x) = argmin_u  eta h(u) + 1/2 ||u - x||^2``

MCP and SCAD are weakly convex (moduli ``-1/gamma`` and ``-1/(a-1)``), so
their prox subproblem is only strongly convex for ``eta`` below a threshold;
querying beyond it raises :class:`IllPosedProxError`.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_point, check_positive, check_scalar
from .exceptions import ArgumentError, IllPosedProxError
from .problem import ProxOracle


@dataclass(frozen=True)
class McpParams:
    lam: float
    gamma: float

    def __post_init__(self):
        check_positive(self.lam, "lam")
        check_scalar(self.gamma, "gamma", lower=1.0, lower_inclusive=False)

    @property
    def strong_mu(self):
        return -1.0 / self.gamma


@dataclass(frozen=True)
class ScadParams:
    lam: float
    a: float

    def __post_init__(self):
        check_positive(self.lam, "lam")
        check_scalar(self.a, "a", lower=2.0, lower_inclusive=False)

    @property
    def strong_mu(self):
        return -1.0 / (self.a - 1.0)


def mcp_value(x, p):
    """Minimax concave penalty, elementwise."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    inner = p.lam * ax - ax * ax / (2.0 * p.gamma)
    out = np.where(ax <= p.gamma * p.lam, inner, 0.5 * p.gamma * p.lam ** 2)
    return out if out.ndim else float(out)


def scad_value(x, p):
    """Smoothly clipped absolute deviation, elementwise."""
    lam, a = p.lam, p.a
    ax = np.abs(np.asarray(x, dtype=np.float64))
    mid = (-ax * ax + 2.0 * a * lam * ax - lam ** 2) / (2.0 * (a - 1.0))
    out = np.where(ax <= lam, lam * ax,
                   np.where(ax <= a * lam, mid, 0.5 * (a + 1.0) * lam ** 2))
    return out if out.ndim else float(out)


def prox_l1(x, eta, lam):
    """Soft thresholding ``sign(x) max(|x| - eta lam, 0)``."""
    check_positive(eta, "eta")
    x = np.asarray(x, dtype=np.float64)
    t = eta * lam
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def prox_mcp(x, eta, p):
    """Firm thresholding.

    Zero on ``|x| <= eta lam``, identity on ``|x| > gamma lam`` and the
    rescaled shrinkage ``(|x| - eta lam) / (1 - eta/gamma)`` in between.
    Requires ``eta < gamma``.
    """
    check_positive(eta, "eta")
    if eta >= p.gamma:
        raise IllPosedProxError(
            f"MCP prox needs eta < gamma = {p.gamma}, got eta = {eta}")
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    shrunk = np.sign(x) * np.maximum(ax - eta * p.lam, 0.0) / (1.0 - eta / p.gamma)
    return np.where(ax <= p.gamma * p.lam, shrunk, x)


def prox_scad(x, eta, p):
    """SCAD thresholding for a general step ``eta < a - 1``.

    Breakpoints in ``|x|``: ``eta lam`` (end of the dead zone),
    ``(1 + eta) lam`` (end of soft thresholding) and ``a lam`` (start of
    the identity region).
    """
    check_positive(eta, "eta")
    lam, a = p.lam, p.a
    if eta >= a - 1.0:
        raise IllPosedProxError(
            f"SCAD prox needs eta < a - 1 = {a - 1.0}, got eta = {eta}")
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    s = np.sign(x)
    soft = s * np.maximum(ax - eta * lam, 0.0)
    middle = s * ((a - 1.0) * ax - eta * a * lam) / (a - 1.0 - eta)
    return np.where(ax <= (1.0 + eta) * lam, soft,
                    np.where(ax <= a * lam, middle, x))


def prox_box(x, eta, lo, hi):
    """Projection onto ``[lo, hi]``; ``eta`` is ignored."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if np.any(lo > hi):
        raise ArgumentError("box bounds need lo <= hi on every coordinate")
    return np.clip(np.asarray(x, dtype=np.float64), lo, hi)


# Differences without cancellation --------------------------------------------

def _piecewise_diff(x, ref, value, breaks, inner):
    """``value(x) - value(ref)`` elementwise for an even penalty.

    ``inner[i](a, b)`` is the cancellation-free difference on the i-th piece
    between consecutive ``breaks`` of ``|x|``; pairs on different pieces use
    the plain difference.
    """
    a, b = np.abs(x), np.abs(ref)
    ia = np.searchsorted(breaks, a, side="left")
    ib = np.searchsorted(breaks, b, side="left")
    out = value(x) - value(ref)
    for i, fn in enumerate(inner):
        same = (ia == i) & (ib == i)
        if np.any(same):
            out[same] = fn(a[same], b[same])
    return out


def mcp_diff(x, ref, p):
    lam, gam = p.lam, p.gamma
    return _piecewise_diff(
        np.asarray(x, dtype=np.float64), np.asarray(ref, dtype=np.float64),
        lambda u: np.asarray(mcp_value(u, p), dtype=np.float64), [gam * lam],
        [lambda a, b: (a - b) * (lam - (a + b) / (2.0 * gam)),
         lambda a, b: np.zeros_like(a)])


def scad_diff(x, ref, p):
    lam, a_ = p.lam, p.a
    return _piecewise_diff(
        np.asarray(x, dtype=np.float64), np.asarray(ref, dtype=np.float64),
        lambda u: np.asarray(scad_value(u, p), dtype=np.float64), [lam, a_ * lam],
        [lambda a, b: lam * (a - b),
         lambda a, b: (a - b) * (2.0 * a_ * lam - (a + b)) / (2.0 * (a_ - 1.0)),
         lambda a, b: np.zeros_like(a)])


# Oracle factories -----------------------------------------------------------

def l1(lam):
    lam = check_positive(lam, "lam")
    terms = lambda x: lam * np.abs(x)
    return ProxOracle(
        value=lambda x: float(np.sum(terms(x))),
        prox=lambda x, eta: prox_l1(x, eta, lam),
        strong_mu=0.0, terms=terms, name="l1",
        diff=lambda x, ref: lam * (np.abs(x) - np.abs(ref)))


def mcp(lam, gamma):
    p = McpParams(lam, gamma)
    terms = lambda x: mcp_value(np.asarray(x), p)
    return ProxOracle(
        value=lambda x: float(np.sum(terms(x))),
        prox=lambda x, eta: prox_mcp(x, eta, p),
        strong_mu=p.strong_mu, terms=terms, name="mcp",
        diff=lambda x, ref: mcp_diff(x, ref, p))


def scad(lam, a):
    p = ScadParams(lam, a)
    terms = lambda x: scad_value(np.asarray(x), p)
    return ProxOracle(
        value=lambda x: float(np.sum(terms(x))),
        prox=lambda x, eta: prox_scad(x, eta, p),
        strong_mu=p.strong_mu, terms=terms, name="scad",
        diff=lambda x, ref: scad_diff(x, ref, p))


def box(lo, hi):
    lo = check_point(lo, name="lo")
    hi = check_point(hi, lo.shape[0], name="hi")
    if np.any(lo > hi):
        raise ArgumentError("box bounds need lo <= hi on every coordinate")

    def terms(x):
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, 0.0, np.inf)

    return ProxOracle(
        value=lambda x: float(np.sum(terms(x))),
        prox=lambda x, eta: prox_box(x, eta, lo, hi),
        strong_mu=0.0, terms=terms, name="box")
