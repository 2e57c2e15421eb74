"""Figure-style experiments: analytic curves, bounds and Monte Carlo columns as tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import analytic as an
from . import montecarlo as mc
from .analytic import EventModel, NetworkModel
from .montecarlo import SeedSpec
from .tables import CurveTable

DEFAULT_POINTS = 101
DEFAULT_SAMPLES = 100_000


def default_r_grid(net: NetworkModel, points: int = DEFAULT_POINTS) -> np.ndarray:
    return np.linspace(0.0, 2 * net.r_d, points)


def default_t_grid(net: NetworkModel, ev: EventModel, points: int = DEFAULT_POINTS) -> np.ndarray:
    """Times from 0 until the dilated envelope radius reaches ``2 r_d``."""
    if not ev.v_F > 0:
        raise ValueError("a default time grid needs v_F > 0")
    t_max = max(2 * net.r_d - net.r_S, 0.0) / ev.v_F
    if t_max == 0:
        t_max = 1.0
    return np.linspace(0.0, t_max, points)


@dataclass(frozen=True)
class ExperimentSpec:
    net: NetworkModel
    ev: EventModel = EventModel()
    grid: Optional[tuple[float, ...]] = None
    n_samples: int = DEFAULT_SAMPLES
    seed: SeedSpec = SeedSpec()

    def __post_init__(self):
        if self.grid is not None:
            g = tuple(float(x) for x in self.grid)
            if not g:
                raise ValueError("grid must be non-empty")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ValueError("grid must be strictly increasing")
            object.__setattr__(self, "grid", g)
        if self.n_samples < 0:
            raise ValueError("n_samples must be >= 0")

    def r_grid(self) -> np.ndarray:
        return np.asarray(self.grid) if self.grid is not None else default_r_grid(self.net)

    def t_grid(self) -> np.ndarray:
        return np.asarray(self.grid) if self.grid is not None else default_t_grid(self.net, self.ev)


def _mc_columns(table: CurveTable, prefix="mc"):
    return {prefix: table.column("mc"), f"{prefix}_std_error": table.column("mc_std_error")}


def run_cdf_experiment(spec: ExperimentSpec, r_d_values: Optional[Sequence[float]] = None) -> list[CurveTable]:
    """
    Contact-distance CDF, its three bounds and a Monte Carlo estimate.

    One table per forest radius in ``r_d_values`` (default: ``spec.net.r_d``),
    each with ``m`` held at ``spec.net.m``.  MC columns are omitted when
    ``spec.n_samples`` is 0.
    """
    tables = []
    for r_d in r_d_values if r_d_values is not None else [spec.net.r_d]:
        net = replace(spec.net, r_d=float(r_d))
        sub = replace(spec, net=net)
        grid = sub.r_grid()
        cols = {
            "r": grid,
            "cdf": [an.contact_cdf(r, net) for r in grid],
            "upper": [an.contact_cdf_upper(r, net) for r in grid],
            "lower": [an.contact_cdf_lower(r, net) for r in grid],
            "loose_upper": [an.contact_cdf_loose_upper(r, net) for r in grid],
        }
        if spec.n_samples:
            cols.update(_mc_columns(mc.empirical_contact_cdf(net, grid, spec.n_samples, spec.seed)))
        meta = {"r_d": net.r_d, "m": net.m, "n_samples": spec.n_samples}
        tables.append(CurveTable.from_columns(cols, meta=meta))
    return tables


def run_bound_deviation(spec: ExperimentSpec) -> CurveTable:
    """Gaps ``upper - cdf`` and ``cdf - lower`` over the r grid; argmax locations go in ``meta``."""
    net = spec.net
    grid = spec.r_grid()
    exact = np.array([an.contact_cdf(r, net) for r in grid])
    up = np.array([an.contact_cdf_upper(r, net) for r in grid]) - exact
    lo = exact - np.array([an.contact_cdf_lower(r, net) for r in grid])
    meta = {
        "r_d": net.r_d,
        "m": net.m,
        "max_upper_deviation": float(up.max()),
        "argmax_upper_deviation": float(grid[up.argmax()]),
        "max_lower_deviation": float(lo.max()),
        "argmax_lower_deviation": float(grid[lo.argmax()]),
    }
    return CurveTable.from_columns({"r": grid, "upper_deviation": up, "lower_deviation": lo}, meta)


def run_sensing_curve(spec: ExperimentSpec) -> CurveTable:
    """Event-sensing probability over time with its bounds and a Monte Carlo estimate."""
    net, ev = spec.net, spec.ev
    grid = spec.t_grid()
    cols = {
        "t": grid,
        "sensing_prob": [an.sensing_prob(t, net, ev) for t in grid],
        "upper": [an.sensing_prob_upper(t, net, ev) for t in grid],
        "lower": [an.sensing_prob_lower(t, net, ev) for t in grid],
        "loose_upper": [an.sensing_prob_loose_upper(t, net, ev) for t in grid],
    }
    if spec.n_samples:
        cols.update(_mc_columns(mc.empirical_sensing_prob(net, ev, grid, spec.n_samples, spec.seed)))
    meta = {"r_d": net.r_d, "m": net.m, "r_S": net.r_S, "v_F": ev.v_F, "n_samples": spec.n_samples}
    return CurveTable.from_columns(cols, meta=meta)


def max_sensing_deviation(spec: ExperimentSpec) -> tuple[float, float]:
    """Largest ``upper - exact`` and ``exact - lower`` of the sensing curve."""
    table = run_sensing_curve(replace(spec, n_samples=0))
    exact = table.column("sensing_prob")
    return float((table.column("upper") - exact).max()), float((exact - table.column("lower")).max())


def _label(x: float) -> str:
    return f"{x:g}"


def run_range_sweep(spec: ExperimentSpec, r_S_list: Sequence[float]) -> CurveTable:
    """One sensing-probability column per sensing radius, on a shared time grid.

    Without an explicit grid the time axis runs until the smallest radius
    saturates.  MC columns (common seed per radius) are added when
    ``spec.n_samples`` is nonzero.
    """
    if not r_S_list:
        raise ValueError("r_S_list must be non-empty")
    if spec.grid is not None:
        grid = np.asarray(spec.grid)
    else:
        grid = default_t_grid(replace(spec.net, r_S=float(min(r_S_list))), spec.ev)
    cols = {"t": grid}
    for r_s in r_S_list:
        net = replace(spec.net, r_S=float(r_s))
        cols[f"p_rs{_label(r_s)}"] = [an.sensing_prob(t, net, spec.ev) for t in grid]
        if spec.n_samples:
            emp = mc.empirical_sensing_prob(net, spec.ev, grid, spec.n_samples, spec.seed)
            cols.update(_mc_columns(emp, prefix=f"mc_rs{_label(r_s)}"))
    meta = {"r_d": spec.net.r_d, "m": spec.net.m, "v_F": spec.ev.v_F, "n_samples": spec.n_samples}
    return CurveTable.from_columns(cols, meta=meta)


def tradeoff_radius(total_area: float, m: float) -> float:
    """Sensing radius that keeps ``m * pi * r_S^2`` equal to ``total_area``."""
    if not (total_area >= 0 and m > 0):
        raise ValueError("total_area >= 0 and m > 0 required")
    return math.sqrt(total_area / (math.pi * m))


def run_tradeoff(total_area: float, m_list: Sequence[float], spec: ExperimentSpec, t: float = 10.0) -> CurveTable:
    """Sensing probability at time ``t`` for each mean sensor count at fixed total sensing area."""
    ms = sorted(float(m) for m in m_list)
    radii = [tradeoff_radius(total_area, m) for m in ms]
    probs, mc_est, mc_se = [], [], []
    for m, r_s in zip(ms, radii):
        net = replace(spec.net, m=m, r_S=r_s)
        probs.append(an.sensing_prob(t, net, spec.ev))
        if spec.n_samples:
            emp = mc.empirical_sensing_prob(net, spec.ev, [t], spec.n_samples, spec.seed)
            mc_est.append(emp.rows[0][1])
            mc_se.append(emp.rows[0][2])
    cols = {"m": ms, "r_S": radii, "sensing_prob": probs}
    if spec.n_samples:
        cols.update({"mc": mc_est, "mc_std_error": mc_se})
    return CurveTable.from_columns(
        cols, meta={"total_area": total_area, "t": t, "r_d": spec.net.r_d, "v_F": spec.ev.v_F,
                    "n_samples": spec.n_samples},
    )


def ks_statistic(a: CurveTable, b: CurveTable, column: str = "mc") -> float:
    """Largest absolute gap between two tables' ``column`` over their shared abscissa."""
    xa, xb = a.abscissa, b.abscissa
    shared, ia, ib = np.intersect1d(xa, xb, return_indices=True)
    if shared.size == 0:
        raise ValueError("tables share no abscissa values")
    return float(np.max(np.abs(a.column(column)[ia] - b.column(column)[ib])))


def pooled_sigma(a: CurveTable, b: CurveTable, column: str = "mc_std_error") -> np.ndarray:
    _, ia, ib = np.intersect1d(a.abscissa, b.abscissa, return_indices=True)
    return np.hypot(a.column(column)[ia], b.column(column)[ib])


def agreement_count(table: CurveTable, analytic_col: str, mc_col="mc", se_col="mc_std_error",
                    k=mc.SIGMA_MULTIPLIER, n=None):
    """
    Number of rows where ``|analytic - mc| <= k * sigma``.

    With ``n`` (default ``table.meta["n_samples"]``) sigma is the binomial
    standard deviation ``sqrt(p (1 - p) / n)`` at the analytic value ``p``;
    otherwise the table's Wald column is used.  The Wald error collapses to 0
    whenever every sample lands on the same side, which happens routinely
    near saturation.
    """
    p = table.column(analytic_col)
    gap = np.abs(p - table.column(mc_col))
    n = table.meta.get("n_samples") if n is None else n
    if n:
        sigma = np.sqrt(np.clip(p * (1 - p), 0.0, None) / n)
    else:
        sigma = table.column(se_col)
    return int(np.sum((gap <= k * sigma) | (gap <= 1e-12)))


# Captioned parameter sets.  fig3/fig5 reuse fig2/fig4 parameters;
# the second forest radius of fig5 is not stated and is chosen here.
PRESETS = {
    "fig2": dict(r_d=(5.0, 10.0), m=5.0),
    "fig3": dict(r_d=5.0, m=5.0),
    "fig4": dict(r_d=10.0, m=10.0, r_S=1.0, v_F=1.0),
    "fig5": dict(r_d=(10.0, 20.0), m=10.0, r_S=1.0, v_F=1.0),
    "fig6": dict(r_d=40.0, m=40.0, v_F=0.5, r_S=(1.0, 2.0, 4.0)),
    "fig7": dict(r_d=40.0, v_F=0.5, total_area=40.0, m=(5.0, 10.0, 20.0, 40.0), t=10.0),
}


def run_preset(name: str, n_samples: int = DEFAULT_SAMPLES, seed: SeedSpec = SeedSpec(),
               points: int = DEFAULT_POINTS) -> CurveTable:
    """Run a named figure preset and return a single table."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    p = PRESETS[name]
    if name == "fig2":
        r_ds = p["r_d"]
        grid = tuple(np.linspace(0.0, 2 * max(r_ds), points))
        spec = ExperimentSpec(NetworkModel(r_ds[0], p["m"]), grid=grid, n_samples=n_samples, seed=seed)
        cols = {"r": grid}
        for r_d, table in zip(r_ds, run_cdf_experiment(spec, r_ds)):
            for c in table.columns[1:]:
                cols[f"{c}_rd{_label(r_d)}"] = table.column(c)
        return CurveTable.from_columns(cols, meta={"preset": name})
    if name == "fig3":
        net = NetworkModel(p["r_d"], p["m"])
        return run_bound_deviation(ExperimentSpec(net, grid=tuple(default_r_grid(net, points))))
    if name == "fig4":
        net = NetworkModel(p["r_d"], p["m"], p["r_S"])
        ev = EventModel(p["v_F"])
        grid = tuple(default_t_grid(net, ev, points))
        return run_sensing_curve(ExperimentSpec(net, ev, grid, n_samples, seed))
    if name == "fig5":
        ev = EventModel(p["v_F"])
        nets = [NetworkModel(r_d, p["m"], p["r_S"]) for r_d in p["r_d"]]
        grid = tuple(default_t_grid(nets[-1], ev, points))
        cols = {"t": grid}
        for net in nets:
            table = run_sensing_curve(ExperimentSpec(net, ev, grid, 0, seed))
            exact = table.column("sensing_prob")
            cols[f"upper_deviation_rd{_label(net.r_d)}"] = table.column("upper") - exact
            cols[f"lower_deviation_rd{_label(net.r_d)}"] = exact - table.column("lower")
        return CurveTable.from_columns(cols, meta={"preset": name})
    if name == "fig6":
        net = NetworkModel(p["r_d"], p["m"])
        ev = EventModel(p["v_F"])
        grid = tuple(default_t_grid(replace(net, r_S=min(p["r_S"])), ev, points))
        return run_range_sweep(ExperimentSpec(net, ev, grid, n_samples, seed), p["r_S"])
    net = NetworkModel(p["r_d"], p["m"][0])
    spec = ExperimentSpec(net, EventModel(p["v_F"]), None, n_samples, seed)
    return run_tradeoff(p["total_area"], p["m"], spec, p["t"])
