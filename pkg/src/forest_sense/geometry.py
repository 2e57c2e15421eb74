"""Areas of disk intersections and Minkowski sums of disks.

All functions accept scalars or numpy arrays (broadcast against each other)
and return a float for scalar input, an ndarray otherwise.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np


class Point2(NamedTuple):
    x: float
    y: float


class Disk(NamedTuple):
    center: Point2
    radius: float


def _as_arrays(*args):
    arrs = [np.asarray(a, dtype=float) for a in args]
    for a in arrs:
        if not np.all(np.isfinite(a)):
            raise ValueError("lengths must be finite")
        if np.any(a < 0):
            raise ValueError("lengths must be non-negative")
    scalar = all(a.ndim == 0 for a in arrs)
    return np.broadcast_arrays(*arrs), scalar


def _out(val, scalar):
    return float(val) if scalar else val


def _x_minus_sin(x):
    # x - sin(x) without cancellation for small x
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = x * x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110))))
    return np.where(x < 0.1, series, x - np.sin(x))


def _segment(r, half_angle):
    """Area of the circular segment cut off by a chord subtending ``2 * half_angle``."""
    return 0.5 * r * r * _x_minus_sin(2 * half_angle)


def lens_area(r1, r2, d):
    """
    Area of the intersection of two disks.

    Parameters
    ----------
    r1, r2 : float or array_like
        Radii of the two disks.
    d : float or array_like
        Distance between the centres.

    Returns
    -------
    float or numpy.ndarray
        ``|B(o, r1) ∩ B(p, r2)|`` with ``|p| = d``.
    """
    (r1, r2, d), scalar = _as_arrays(r1, r2, d)
    small = np.minimum(r1, r2)
    full = np.pi * small**2

    contained = d <= np.abs(r1 - r2)
    disjoint = (d >= r1 + r2) & ~contained
    lens = ~(contained | disjoint)

    out = np.where(contained, full, 0.0)
    if np.any(lens):
        big = np.maximum(r1[lens], r2[lens])
        a, b = r1[lens] / big, r2[lens] / big
        # a subnormal separation must not underflow to zero after scaling
        s = np.maximum(d[lens] / big, np.finfo(float).tiny)
        # half chord from the factored kite product, each difference taken from inputs directly
        outer = np.maximum(((a + b) - s) * ((a + b) + s), 0.0)
        inner = np.maximum((s + (b - a)) / s, 0.0) * np.maximum((s + (a - b)) / s, 0.0)
        h = 0.5 * np.sqrt(outer) * np.sqrt(inner)
        d1 = 0.5 * s + 0.5 * ((a - b) / s) * (a + b)
        d2 = s - d1
        area = _segment(a, np.arctan2(h, d1)) + _segment(b, np.arctan2(h, d2))
        out = out.copy()
        out[lens] = np.clip(area * big**2, 0.0, full[lens])
    return _out(out, scalar)


def _check_lens_regime(r1, r2, d):
    # small slack so grid points computed as |r1 - r2| survive rounding
    eps = 1e-12 * np.maximum(1.0, r1 + r2)
    if np.any(d < np.abs(r1 - r2) - eps) or np.any(d > r1 + r2 + eps):
        raise ValueError("d must satisfy |r1 - r2| <= d <= r1 + r2")


def lens_area_rect_upper(r1, r2, d):
    """Rectangle of width ``r1 + r2 - d`` and height ``2 min(r1, r2)`` covering the lens."""
    (r1, r2, d), scalar = _as_arrays(r1, r2, d)
    _check_lens_regime(r1, r2, d)
    width = np.maximum(r1 + r2 - d, 0.0)
    return _out(width * 2 * np.minimum(r1, r2), scalar)


def lens_area_circ_lower(r1, r2, d):
    """Area of the largest disk inscribed in the lens, radius ``(r1 + r2 - d) / 2``."""
    (r1, r2, d), scalar = _as_arrays(r1, r2, d)
    _check_lens_regime(r1, r2, d)
    rad = np.maximum(r1 + r2 - d, 0.0) / 2
    return _out(np.pi * rad**2, scalar)


def minkowski_ball_radius(r_a, r_b):
    """Radius of ``B(0, r_a) ⊕ B(0, r_b)``."""
    (r_a, r_b), scalar = _as_arrays(r_a, r_b)
    return _out(r_a + r_b, scalar)


def minkowski_sum(a: Disk, b: Disk) -> Disk:
    center = Point2(a.center.x + b.center.x, a.center.y + b.center.y)
    return Disk(center, minkowski_ball_radius(a.radius, b.radius))
