from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass
class CurveTable:
    """Rectangular table whose first column is a strictly increasing abscissa."""

    columns: list[str]
    rows: list[tuple[float, ...]]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.rows = [tuple(float(v) for v in row) for row in self.rows]
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(f"row {row!r} does not have {width} columns")
        xs = [row[0] for row in self.rows]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("abscissae must be strictly increasing")

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows])

    @property
    def abscissa(self) -> np.ndarray:
        return self.column(self.columns[0])

    @classmethod
    def from_columns(cls, data: dict[str, Sequence[float]], meta=None) -> "CurveTable":
        names = list(data)
        rows = list(zip(*(data[k] for k in names)))
        return cls(names, rows, dict(meta or {}))
