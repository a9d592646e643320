"""Residual histories and block-bootstrap scenario sampling."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class ResidualHistory:
    """Past forecast residuals, one row per historical day.

    Rows keep the original units of the target series. Row length must match
    the series the history is used with (steps per day for per-step series,
    1 for daily totals).
    """

    residuals: np.ndarray

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.residuals, dtype=float))
        arr.setflags(write=False)
        object.__setattr__(self, "residuals", arr)

    @property
    def n_days(self) -> int:
        return self.residuals.shape[0]

    @property
    def row_length(self) -> int:
        return self.residuals.shape[1]

    @classmethod
    def from_csv(cls, path: str) -> "ResidualHistory":
        """Read residuals from CSV.

        Two layouts are accepted: wide, one column per step-of-day (an
        optional leading ``date`` column is ignored), or long with header
        ``date,hour,value`` where rows are grouped into days by date.
        """
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                rows = list(csv.reader(fh))
        except FileNotFoundError:
            raise InputError(f"residual file not found: {path}") from None
        if not rows:
            raise InputError(f"{path}: empty file")
        header, body = rows[0], rows[1:]
        if [h.strip().lower() for h in header] == ["date", "hour", "value"]:
            return cls._from_long(body, path)
        return cls._from_wide(header, body, path)

    @classmethod
    def _from_wide(cls, header, body, path) -> "ResidualHistory":
        skip = 1 if header and header[0].strip().lower() == "date" else 0
        data = []
        for i, row in enumerate(body):
            try:
                data.append([float(x) for x in row[skip:]])
            except ValueError:
                raise InputError(f"{path}: non-numeric value on data row {i + 1}") from None
        if not data:
            raise InputError(f"{path}: no residual rows")
        lengths = {len(r) for r in data}
        if len(lengths) != 1:
            raise InputError(f"{path}: ragged rows, lengths {sorted(lengths)}")
        return cls(np.array(data))

    @classmethod
    def _from_long(cls, body, path) -> "ResidualHistory":
        by_day: dict[str, dict[int, float]] = {}
        for i, row in enumerate(body):
            if len(row) != 3:
                raise InputError(f"{path}: long-format row {i + 1} needs 3 columns")
            date, hour, value = row
            try:
                by_day.setdefault(date, {})[int(hour)] = float(value)
            except ValueError:
                raise InputError(f"{path}: non-numeric value on data row {i + 1}") from None
        if not by_day:
            raise InputError(f"{path}: no residual rows")
        lengths = {len(v) for v in by_day.values()}
        if len(lengths) != 1:
            raise InputError(f"{path}: days have differing step counts {sorted(lengths)}")
        data = [
            [hours[h] for h in sorted(hours)] for _, hours in sorted(by_day.items())
        ]
        return cls(np.array(data))


def bootstrap_scenarios(
    point_forecast: Sequence[float],
    history: ResidualHistory,
    n: int,
    seed,
    domain: tuple[float | None, float | None] | None = None,
) -> np.ndarray:
    """Sample ``n`` scenarios as forecast plus whole-day residual rows.

    Each scenario adds one uniformly drawn historical residual row (sampled
    with replacement) to the point forecast, keeping the day's residuals
    together so their time coupling survives. ``domain`` optionally clamps
    the result to physical bounds, e.g. ``(0.0, 1.0)`` for shares.

    Returns an (n, len(forecast)) array; deterministic for a fixed seed.
    """
    forecast = np.asarray(point_forecast, dtype=float)
    if history.n_days < 1:
        raise InputError("residual history is empty")
    if history.row_length != len(forecast):
        raise InputError(
            f"residual rows have length {history.row_length}, forecast has {len(forecast)}"
        )
    if n < 1:
        raise InputError("need n >= 1 scenarios")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, history.n_days, size=n)
    out = forecast[None, :] + history.residuals[picks]
    if domain is not None:
        lo, hi = domain
        out = np.clip(out, lo if lo is not None else -np.inf, hi if hi is not None else np.inf)
    return out
