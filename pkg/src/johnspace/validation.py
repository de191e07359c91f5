"""Small argument-checking helpers used by the public entry points."""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError


def check_positive(name, value):
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def check_at_least(name, value, bound):
    if not math.isfinite(value) or value < bound:
        raise ParameterError(f"{name} must be >= {bound}, got {value!r}")
    return float(value)


def check_in_range(name, value, lo, hi):
    if not (lo <= value <= hi):
        raise ParameterError(f"{name} must lie in [{lo}, {hi}], got {value!r}")
    return float(value)


def as_point(p):
    """Coerce to a finite (x, y) float pair."""
    q = np.asarray(p, dtype=float).reshape(-1)
    if q.shape != (2,) or not np.all(np.isfinite(q)):
        raise ParameterError(f"expected a finite planar point, got {p!r}")
    return float(q[0]), float(q[1])


def as_points_array(pts):
    """Coerce to an (n, 2) float array of finite planar points."""
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1 and arr.shape == (2,):
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParameterError(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("points must have finite coordinates")
    return arr
