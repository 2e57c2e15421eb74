"""Monte Carlo simulator of the finite Boolean-Poisson sensor field.

Realizations are drawn shard by shard; shard ``i`` owns the ``i``-th child of
``SeedSequence(master_seed)`` and a fixed share of the samples, so estimates
depend only on ``(SeedSpec, parameters)`` and not on worker scheduling.
Per-shard results are integer counts, merged by summation.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import EventModel, NetworkModel
from .geometry import Point2
from .tables import CurveTable

#: confidence multiplier used for every "within k sigma" comparison
SIGMA_MULTIPLIER = 3.0


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int = 0
    shard_count: int = 1

    def __post_init__(self):
        if self.shard_count < 1:
            raise ValueError("shard_count must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def generators(self) -> list[np.random.Generator]:
        children = np.random.SeedSequence(self.master_seed).spawn(self.shard_count)
        return [np.random.Generator(np.random.PCG64(c)) for c in children]

    def split(self, n: int) -> list[int]:
        base, extra = divmod(n, self.shard_count)
        return [base + (i < extra) for i in range(self.shard_count)]


@dataclass
class Realization:
    """One deployment ``sensors`` (shape ``(N, 2)``) and one event origin."""

    sensors: np.ndarray
    event_origin: Point2


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    std_error: float
    n_samples: int

    @classmethod
    def from_count(cls, hits: int, n: int) -> "EstimatorResult":
        p = hits / n
        return cls(p, math.sqrt(p * (1 - p) / n), n)

    def within(self, value: float, k: float = SIGMA_MULTIPLIER) -> bool:
        return abs(self.estimate - value) <= k * self.std_error


def _uniform_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    rad = radius * np.sqrt(rng.random(n))
    theta = 2 * np.pi * rng.random(n)
    return np.column_stack((rad * np.cos(theta), rad * np.sin(theta)))


def sample_fhppp(net: NetworkModel, rng: np.random.Generator) -> np.ndarray:
    """Poisson(m) many points i.i.d. uniform on ``B(o, r_d)``, as an ``(N, 2)`` array."""
    return _uniform_disk(rng, int(rng.poisson(net.m)), net.r_d)


def sample_event_origin(net: NetworkModel, rng: np.random.Generator) -> Point2:
    x, y = _uniform_disk(rng, 1, net.r_d)[0]
    return Point2(float(x), float(y))


def sample_realization(net: NetworkModel, rng: np.random.Generator) -> Realization:
    sensors = sample_fhppp(net, rng)
    return Realization(sensors, sample_event_origin(net, rng))


def contact_distance(real: Realization) -> float:
    """Distance from the event origin to the closest sensor; ``inf`` if there are none."""
    if len(real.sensors) == 0:
        return math.inf
    diff = np.asarray(real.sensors, dtype=float) - np.asarray(real.event_origin, dtype=float)
    return float(np.min(np.hypot(diff[:, 0], diff[:, 1])))


def is_detected(real: Realization, net: NetworkModel, ev: EventModel, t: float) -> bool:
    """True iff some sensing disk touches the event envelope at time ``t`` (tangency counts)."""
    return contact_distance(real) <= ev.fire_radius(t, net)


def _batch(net: NetworkModel, rng: np.random.Generator, n: int):
    """Draw ``n`` realizations at once.

    Returns per-realization counts, the concatenated sensor array, and the
    event origins.
    """
    counts = rng.poisson(net.m, size=n)
    sensors = _uniform_disk(rng, int(counts.sum()), net.r_d)
    events = _uniform_disk(rng, n, net.r_d)
    return counts, sensors, events


def _contact_distances(net, rng, n):
    counts, sensors, events = _batch(net, rng, n)
    dist = np.full(n, np.inf)
    nonempty = counts > 0
    if sensors.shape[0]:
        owner = np.repeat(np.arange(n), counts)
        diff = sensors - events[owner]
        d = np.hypot(diff[:, 0], diff[:, 1])
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        dist[nonempty] = np.minimum.reduceat(d, starts[nonempty])
    return dist, counts


def _nn_distances(counts: np.ndarray, sensors: np.ndarray) -> np.ndarray:
    """Nearest-neighbour distance of every sensor within its own realization (``inf`` if alone)."""
    out = np.full(sensors.shape[0], np.inf)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    for k in np.unique(counts):
        if k < 2:
            continue
        idx = starts[counts == k][:, None] + np.arange(k)
        pts = sensors[idx]
        diff = pts[:, :, None, :] - pts[:, None, :, :]
        d = np.hypot(diff[..., 0], diff[..., 1])
        d[:, np.arange(k), np.arange(k)] = np.inf
        out[idx] = d.min(axis=2)
    return out


def _fan_out(fn, seed: SeedSpec, n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    jobs = list(zip(seed.generators(), seed.split(n)))
    workers = min(seed.shard_count, os.cpu_count() or 1)
    if workers == 1:
        parts = [fn(rng, k) for rng, k in jobs]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    return [p for p, (_, k) in zip(parts, jobs) if k > 0]


def _count_le(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    # number of finite values <= each grid point; inf never counts
    ordered = np.sort(values)
    return np.searchsorted(ordered, grid, side="right").astype(np.int64)


def simulate_contact_distances(net: NetworkModel, n: int, seed: SeedSpec) -> np.ndarray:
    """Contact distance of each of ``n`` realizations, shards concatenated in index order."""
    parts = _fan_out(lambda rng, k: _contact_distances(net, rng, k)[0] if k else None, seed, n)
    return np.concatenate(parts)


def contact_distance_counts(net, r_grid, n, seed):
    """Per-grid-point count of realizations with contact distance ``<= r``."""
    grid = np.asarray(r_grid, dtype=float)

    def shard(rng, k):
        if k == 0:
            return None
        return _count_le(_contact_distances(net, rng, k)[0], grid)

    return np.sum(_fan_out(shard, seed, n), axis=0)


def _curve(label, grid, hits, n):
    rows = []
    for x, h in zip(grid, hits):
        res = EstimatorResult.from_count(int(h), n)
        rows.append((float(x), res.estimate, res.std_error))
    return CurveTable([label, "mc", "mc_std_error"], rows)


def empirical_contact_cdf(net: NetworkModel, r_grid: Sequence[float], n: int, seed: SeedSpec):
    """Fraction of ``n`` realizations whose contact distance is ``<= r``, per grid point."""
    hits = contact_distance_counts(net, r_grid, n, seed)
    return _curve("r", r_grid, hits, n)


def empirical_nn_cdf(net: NetworkModel, r_grid: Sequence[float], n: int, seed: SeedSpec):
    """
    Ratio estimator ``sum #{sensors with NN distance <= r} / sum #{sensors}``.

    Sensors that are alone in their realization add to the denominator only.
    The standard error is the delta-method error of the ratio over
    realizations.
    """
    grid = np.asarray(r_grid, dtype=float)

    def shard(rng, k):
        if k == 0:
            return None
        counts, sensors, _ = _batch(net, rng, k)
        nn = _nn_distances(counts, sensors)
        owner = np.repeat(np.arange(k), counts)
        # per-realization numerators for the ratio's variance
        per_real = np.zeros((k, grid.size))
        for j, r in enumerate(grid):
            hit = nn <= r
            per_real[:, j] = np.bincount(owner[hit], minlength=k)
        c = counts.astype(float)
        return (
            per_real.sum(axis=0),
            float(c.sum()),
            (per_real**2).sum(axis=0),
            float((c**2).sum()),
            (per_real * c[:, None]).sum(axis=0),
        )

    parts = _fan_out(shard, seed, n)
    num, den, num2, den2, cross = (sum(p[i] for p in parts) for i in range(5))
    rows = []
    for j, r in enumerate(grid):
        if den == 0:
            rows.append((float(r), 0.0, 0.0))
            continue
        p = num[j] / den
        # var of mean(num - p * den) over realizations, scaled by mean(den)^2
        resid2 = num2[j] - 2 * p * cross[j] + p**2 * den2
        var = max(resid2 / n, 0.0) / n / (den / n) ** 2
        rows.append((float(r), float(p), math.sqrt(var)))
    return CurveTable(["r", "mc", "mc_std_error"], rows)


def empirical_sensing_prob(net: NetworkModel, ev: EventModel, t_grid: Sequence[float], n: int, seed: SeedSpec):
    """
    Fraction of realizations detected by each time in ``t_grid``.

    All time points share the same realizations, so the curve is
    nondecreasing by construction.
    """
    radii = [ev.fire_radius(float(t), net) for t in t_grid]
    hits = contact_distance_counts(net, radii, n, seed)
    return _curve("t", t_grid, hits, n)


def empirical_detection_time(net: NetworkModel, ev: EventModel, n: int, seed: SeedSpec) -> np.ndarray:
    """Per-realization time until the envelope first meets a sensing disk (``inf`` if no sensors)."""
    if not ev.v_F > 0:
        raise ValueError("detection time needs v_F > 0")
    dist = simulate_contact_distances(net, n, seed)
    with np.errstate(invalid="ignore"):
        return np.maximum(0.0, (dist - net.r_S) / ev.v_F)


def void_fraction(net: NetworkModel, n: int, seed: SeedSpec) -> EstimatorResult:
    """Fraction of deployments with no sensor at all."""
    empty = np.isinf(simulate_contact_distances(net, n, seed)).sum()
    return EstimatorResult.from_count(int(empty), n)
