"""Exit criteria, one test per criterion; each records a PASS/FAIL line for the terminal summary."""
import logging
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from forest_sense import analytic as an
from forest_sense import cli
from forest_sense import experiments as ex
from forest_sense import montecarlo as mc
from forest_sense.analytic import EventModel, NetworkModel
from forest_sense.geometry import lens_area
from forest_sense.montecarlo import SeedSpec

from conftest import ACCEPTANCE_LINES, dart_area

N = 100_000
POINTS = 101
FIG4 = NetworkModel(10.0, 10.0, 1.0)
V1 = EventModel(1.0)


def report(tag, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def cdf_tables():
    spec = ex.ExperimentSpec(NetworkModel(5.0, 5.0), n_samples=N, seed=SeedSpec(2024, 4))
    start = time.perf_counter()
    tables = ex.run_cdf_experiment(spec, [5.0, 10.0])
    return tables, time.perf_counter() - start


def test_c01_contact_cdf_matches_monte_carlo(cdf_tables):
    tables, elapsed = cdf_tables
    counts = [ex.agreement_count(t, "cdf") for t in tables]
    ok = all(len(t) == POINTS and c >= 95 for t, c in zip(tables, counts)) and elapsed < 30
    report("C1 contact CDF vs MC", ok, f"within 3 sigma at {counts} of {POINTS} points (r_d=5, 10); {elapsed:.1f}s")


def test_c02_bound_sandwich(cdf_tables):
    tables, _ = cdf_tables
    worst = 0.0
    edge = 0.0
    for t in tables:
        r = t.column("r")
        lo, c, up, loose = (t.column(k) for k in ("lower", "cdf", "upper", "loose_upper"))
        worst = max(worst, np.max(lo - c), np.max(c - up), np.max(up - loose))
        ends = (r == 0) | (r >= 2 * t.meta["r_d"])
        edge = max(edge, np.max(np.abs(up - c)[ends]), np.max(np.abs(c - lo)[ends]))
    ok = worst <= 0.0 and edge <= 1e-9
    report("C2 bound sandwich", ok, f"max ordering violation {worst:.2e}, deviation at r=0 / r>=2r_d {edge:.2e}")


def test_c03_closed_form_dual_evaluation(cdf_tables, caplog):
    tables, _ = cdf_tables
    lower_gap = upper_gap = upper_algebra_gap = 0.0
    evaluations = []
    for t in tables:
        net = NetworkModel(t.meta["r_d"], t.meta["m"])
        evaluations += [(r, net) for r in t.column("r")]
    grid_t = ex.default_t_grid(FIG4, V1)
    evaluations += [(V1.fire_radius(s, FIG4), FIG4) for s in grid_t]
    with caplog.at_level(logging.WARNING, logger="forest_sense.analytic"):
        for r, net in evaluations:
            lower_gap = max(lower_gap, abs(an.contact_cdf_lower_closed_form(r, net) - an.contact_cdf_lower(r, net)))
            upper_gap = max(upper_gap, abs(an.contact_cdf_upper_closed_form(r, net) - an.contact_cdf_upper(r, net)))
            upper_algebra_gap = max(
                upper_algebra_gap,
                abs(an.contact_cdf_upper_closed_form(r, net) - an.contact_cdf_upper_quad(r, net, cap=False)),
            )
    logged = "differs from quadrature" in caplog.text
    lower_ok = lower_gap <= an.DUAL_EVAL_TOL
    upper_ok = upper_gap <= an.DUAL_EVAL_TOL or logged
    print(f"    discrepancy report: erf lower bound closed form vs quadrature max |gap| = {lower_gap:.2e}")
    print(f"    discrepancy report: rectangle upper bound closed form vs clamped quadrature max |gap| = {upper_gap:.2e}"
          f" (logged: {logged}); vs unclamped rectangle quadrature {upper_algebra_gap:.2e}")
    report("C3 closed-form dual evaluation", lower_ok and upper_ok,
           f"lower gap {lower_gap:.1e}; upper gap {upper_gap:.1e} reported, quadrature bounds used (C2)")


def test_c04_nearest_neighbour_identity():
    net = NetworkModel(5.0, 5.0)
    grid = ex.default_r_grid(net)
    a = mc.empirical_contact_cdf(net, grid, N, SeedSpec(41, 4))
    b = mc.empirical_nn_cdf(net, grid, N, SeedSpec(42, 4))
    gap = np.abs(a.column("mc") - b.column("mc"))
    envelope = 3 * ex.pooled_sigma(a, b)
    ks = ex.ks_statistic(a, b)
    ok = bool(np.all(gap <= envelope + 1e-15))
    report("C4 contact vs NN distance CDF", ok, f"max gap {ks:.4f}; worst gap/envelope {np.max(gap / np.maximum(envelope, 1e-300)):.2f}")


def test_c05_sensing_curve():
    spec = ex.ExperimentSpec(FIG4, V1, n_samples=N, seed=SeedSpec(7, 4))
    table = ex.run_sensing_curve(spec)
    p = table.column("sensing_prob")
    monotone = bool(np.all(np.diff(p) >= 0))
    sat = 1 - math.exp(-10)
    late = [an.sensing_prob(t, FIG4, V1) for t in (19.0, 20.0, 25.0, 100.0)]
    sat_err = max(abs(v - sat) for v in late)
    agree = ex.agreement_count(table, "sensing_prob")
    ok = monotone and sat_err <= 1e-6 and agree >= math.ceil(0.95 * POINTS)
    report("C5 sensing curve (fig4 parameters)", ok,
           f"monotone={monotone}, saturation error {sat_err:.1e}, MC agreement {agree}/{POINTS}")


def test_c06_delegation_identity():
    grid = ex.default_t_grid(FIG4, V1)
    gap = max(abs(an.sensing_prob(t, FIG4, V1) - an.contact_cdf(V1.fire_radius(t, FIG4), FIG4)) for t in grid)
    exact = an.coverage_prob(FIG4) == an.sensing_prob(0.0, FIG4, V1)
    report("C6 delegation identity", gap <= 1e-12 and exact, f"max |gap| {gap:.1e}; coverage == sensing(0): {exact}")


def test_c07_asymptotics():
    tiny = NetworkModel(1e-3, 5.0)
    rs = [2.000001e-3, 3e-3, 0.1, 1.0, 10.0, 1e3]
    small_gap = max(abs(an.contact_cdf(r, tiny) - (1 - math.exp(-5))) for r in rs)
    big = NetworkModel.from_density(1e3, 1 / math.pi)
    grid = np.linspace(0, 10, 101)
    large_gap = max(abs(an.contact_cdf(r, big) - an.contact_cdf_limit_large_rd(r, big)) for r in grid)
    ok = small_gap <= 1e-9 and large_gap <= 1e-3
    report("C7 asymptotics", ok, f"r_d=1e-3 gap {small_gap:.1e}; r_d=1e3 gap {large_gap:.1e}")


def test_c08_range_ordering():
    spec = ex.ExperimentSpec(NetworkModel(40.0, 40.0), EventModel(0.5), n_samples=0)
    table = ex.run_range_sweep(spec, [1.0, 2.0, 4.0])
    cols = [table.column(f"p_rs{r}") for r in ("1", "2", "4")]
    ok = all(np.all(b >= a) for a, b in zip(cols, cols[1:]))
    report("C8 sensing range ordering (fig6)", ok, f"r_S=1 <= 2 <= 4 on {len(table)} time points")


def test_c09_tradeoff():
    spec = ex.ExperimentSpec(NetworkModel(40.0, 1.0), EventModel(0.5), n_samples=0)
    table = ex.run_tradeoff(40.0, [5, 10, 20, 40], spec, t=10.0)
    p = table.column("sensing_prob")
    ok = bool(np.all(np.diff(p) > 0))
    report("C9 count vs range trade-off (fig7)", ok, "P(t=10) = " + ", ".join(f"{v:.4f}" for v in p))


def test_c10_void_mass():
    res = {m: mc.void_fraction(NetworkModel(5.0, m), N, SeedSpec(int(m), 4)) for m in (5.0, 10.0)}
    ok = all(r.within(math.exp(-m)) for m, r in res.items())
    report("C10 void mass", ok, "; ".join(f"m={m:g}: {r.estimate:.5f} vs {math.exp(-m):.5f}" for m, r in res.items()))


def test_c11_geometry():
    rng = np.random.default_rng(11)
    misses = 0
    for _ in range(100):
        r1, r2 = rng.uniform(0.1, 5.0, 2)
        d = rng.uniform(0.0, r1 + r2)
        est, se = dart_area(r1, r2, d, 10**7, rng)
        if abs(lens_area(r1, r2, d) - est) > 3 * se:
            misses += 1
    r1 = rng.uniform(0, 10, 10**4)
    r2 = rng.uniform(0, 10, 10**4)
    d = rng.uniform(0, 25, 10**4)
    step = rng.uniform(0, 2, 10**4)
    a = lens_area(r1, r2, d)
    tol = 1e-10 * (1 + np.maximum(r1, r2) ** 2)
    symmetric = np.all(np.abs(a - lens_area(r2, r1, d)) <= tol)
    monotone = (np.all(lens_area(r1, r2, d + step) <= a + tol)
                and np.all(lens_area(r1 + step, r2, d) >= a - tol)
                and np.all(lens_area(r1, r2 + step, d) >= a - tol))
    # three-sigma misses are expected at rate ~0.3%; allow the binomial 3-sigma count
    ok = misses <= 2 and symmetric and monotone
    report("C11 geometry", ok, f"dart oracle misses {misses}/100; symmetry={symmetric}; monotonicity={monotone}")


def test_c12_cli_determinism(tmp_path):
    runs = [
        ["fig", "fig4", "--samples", str(N), "--seed", "42", "--shards", "4"],
        ["mc", "nn", "--rd", "5", "--m", "5", "--samples", "20000", "--seed", "3", "--shards", "3", "--format", "json"],
        ["sweep-range", "--samples", "20000", "--seed", "5", "--shards", "2"],
    ]
    same = True
    for argv in runs:
        outs = [subprocess.run([sys.executable, "-m", "forest_sense", *argv], capture_output=True).stdout
                for _ in range(2)]
        same &= outs[0] == outs[1] and len(outs[0]) > 0
    report("C12 CLI determinism", same, f"{len(runs)} invocations byte-identical on repeat")
