import math

import numpy as np
import pytest
from scipy import integrate


def chord_overlap_area(r1, r2, d):
    """Intersection area of B((0,0), r1) and B((d,0), r2) by integrating vertical chord overlaps.

    Shares no code with the lens formula; used as a quadrature oracle.
    """
    lo = max(-r1, d - r2)
    hi = min(r1, d + r2)
    if hi <= lo:
        return 0.0

    def overlap(x):
        h1 = math.sqrt(max(r1 * r1 - x * x, 0.0))
        h2 = math.sqrt(max(r2 * r2 - (x - d) ** 2, 0.0))
        return 2 * min(h1, h2)

    pts = [p for p in ((r1 * r1 - r2 * r2 + d * d) / (2 * d) if d > 0 else None,) if p is not None and lo < p < hi]
    val, _ = integrate.quad(overlap, lo, hi, points=pts or None, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def dart_area(r1, r2, d, n, rng, chunk=2_000_000):
    """Dart-throwing estimate of the intersection area inside the smaller disk's bounding box.

    Returns ``(estimate, standard_error)``.
    """
    s = min(r1, r2)
    cx = d if r2 <= r1 else 0.0
    hits = 0
    for start in range(0, n, chunk):
        k = min(chunk, n - start)
        p = rng.random((k, 2)) * (2 * s) - s
        x = p[:, 0] + cx
        y = p[:, 1]
        inside = (x * x + y * y <= r1 * r1) & ((x - d) ** 2 + y * y <= r2 * r2)
        hits += int(inside.sum())
    box = 4 * s * s
    ph = hits / n
    return box * ph, box * math.sqrt(ph * (1 - ph) / n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
