"""Small input validation helpers (in the spirit of ``sklearn.utils``)."""

import numbers

import numpy as np

from .exceptions import ArgumentError


def check_point(x, dimension=None, name="x"):
    """Return ``x`` as a contiguous 1-D float64 array.

    Raises ``ArgumentError`` on a shape mismatch with ``dimension``.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ArgumentError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if dimension is not None and arr.shape[0] != dimension:
        raise ArgumentError(
            f"{name} has length {arr.shape[0]}, expected {dimension}")
    return arr


def check_scalar(value, name, *, lower=None, upper=None,
                 lower_inclusive=True, upper_inclusive=True):
    """Validate a real scalar against optional bounds and return it as float."""
    if isinstance(value, bool) or not isinstance(value, (numbers.Real, np.floating)):
        raise ArgumentError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if np.isnan(value):
        raise ArgumentError(f"{name} must not be NaN")
    if lower is not None:
        bad = value < lower if lower_inclusive else value <= lower
        if bad:
            op = ">=" if lower_inclusive else ">"
            raise ArgumentError(f"{name} must be {op} {lower}, got {value}")
    if upper is not None:
        bad = value > upper if upper_inclusive else value >= upper
        if bad:
            op = "<=" if upper_inclusive else "<"
            raise ArgumentError(f"{name} must be {op} {upper}, got {value}")
    return value


def check_positive(value, name):
    return check_scalar(value, name, lower=0.0, lower_inclusive=False)


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
