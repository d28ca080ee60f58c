"""Independent reference computations used by the tests.

Nothing here calls into the closed-form code paths under test.
"""

import mpmath
import numpy as np


def grid_argmin(objective, lo, hi, step=1e-5, coarse=1e-3):
    """Minimize a unimodal 1-D function by a coarse grid then a fine grid.

    Returns ``(argmin, min value)``.  For a strictly convex objective the
    coarse argmin is within one coarse step of the true minimizer, so the
    fine pass over that bracket equals a fine grid over ``[lo, hi]``.
    """
    u = np.arange(lo, hi + coarse, coarse)
    i = int(np.argmin(objective(u)))
    a, b = u[max(i - 1, 0)], u[min(i + 1, len(u) - 1)]
    fine = np.arange(a, b + step, step)
    vals = objective(fine)
    j = int(np.argmin(vals))
    return float(fine[j]), float(vals[j])


def grid_prox(penalty, x, eta, width):
    """Brute-force ``argmin_u eta*penalty(u) + (u - x)^2 / 2``."""
    lo = min(x, 0.0) - width
    hi = max(x, 0.0) + width
    obj = lambda u: eta * penalty(u) + 0.5 * (u - x) ** 2
    u, val = grid_argmin(obj, lo, hi)
    return u, val, obj


def mcp_scalar(lam, gamma):
    def f(u):
        au = np.abs(u)
        return np.where(au <= gamma * lam, lam * au - au ** 2 / (2 * gamma),
                        0.5 * gamma * lam ** 2)
    return f


def scad_scalar(lam, a):
    def f(u):
        au = np.abs(u)
        return np.where(au <= lam, lam * au,
                        np.where(au <= a * lam,
                                 (-au ** 2 + 2 * a * lam * au - lam ** 2) / (2 * (a - 1)),
                                 (a + 1) / 2 * lam ** 2))
    return f


def l1_scalar(lam):
    return lambda u: lam * np.abs(u)


def central_difference(fun, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return out


def mp_sum_sq(a, b):
    """``sum (a_i - b_i)^2`` in the current mpmath precision."""
    return mpmath.fsum((mpmath.mpf(float(p)) - mpmath.mpf(float(q))) ** 2
                       for p, q in zip(a, b))


def mp_paper6_gap(x):
    """Exact-ish ``f(x) - f*`` for the d = 10000 MCP benchmark."""
    x = [mpmath.mpf(float(v)) for v in x]
    n = 5000
    lam, gam = mpmath.mpf(2), mpmath.mpf(3)

    def mcp(u):
        au = abs(u)
        return lam * au - au ** 2 / (2 * gam) if au <= gam * lam else gam * lam ** 2 / 2

    total = mpmath.mpf(0)
    c2 = mpmath.mpf(1) / 10000
    for i in range(n):
        a = i + 1
        total += a * (x[i] - 10) ** 2 / 2 + mcp(x[i]) - mcp(mpmath.mpf(10))
        total += a * (x[n + i] - c2) ** 2 / 2 - a * c2 ** 2 / 2 + mcp(x[n + i])
    return total
