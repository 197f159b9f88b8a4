"""Per-iteration convergence records."""

from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class HistoryRow:
    iter: int
    energy: float
    volume_error: float
    step_change: float
    newton_iters: int
    intermediate_fraction: float
    wall_ms: float


COLUMNS = tuple(f.name for f in fields(HistoryRow))


class ConvergenceHistory:
    """Append-only list of :class:`HistoryRow` with strictly increasing ``iter``."""

    def __init__(self, rows=()):
        self.rows = []
        for r in rows:
            self.append(r)

    def append(self, row):
        if self.rows and row.iter <= self.rows[-1].iter:
            raise InvalidArgument("history iterations must increase strictly")
        vals = astuple(row)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidArgument(f"non-finite value in history row {row}")
        self.rows.append(row)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __eq__(self, other):
        return isinstance(other, ConvergenceHistory) and self.rows == other.rows
