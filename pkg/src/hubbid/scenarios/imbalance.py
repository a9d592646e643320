"""Proportional imbalance-price factors calibrated from history."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError

# guards ceil/floor against binary rounding of products like 0.6*5
_EPS = 1e-9


@dataclass(frozen=True)
class ImbalanceFactors:
    """Dimensionless multipliers mapping spot price to imbalance prices."""

    k_short: float
    k_long: float

    def __post_init__(self):
        for name in ("k_short", "k_long"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InputError(f"{name} must be finite and >= 0, got {v}")


def calibrate_imbalance_factors(
    spot_hist: Sequence[float],
    short_hist: Sequence[float],
    long_hist: Sequence[float],
    target_underestimation: float,
) -> ImbalanceFactors:
    """Choose factors so a set fraction of history underestimates the cost.

    Rows with non-positive spot price are excluded. ``k_short`` is the
    smallest factor such that ``k_short * spot < short_actual`` in a
    ``target_underestimation`` fraction of the remaining rows, i.e. the lower
    empirical (type-1) quantile of ``short/spot`` at level
    ``1 - target``. ``k_long`` mirrors it on the sale side: the smallest
    factor with ``k_long * spot > long_actual`` in a target fraction of rows.
    """
    spot = np.asarray(spot_hist, dtype=float)
    short = np.asarray(short_hist, dtype=float)
    long_ = np.asarray(long_hist, dtype=float)
    if not (len(spot) == len(short) == len(long_)):
        raise InputError("spot/short/long histories must have equal length")
    if not 0.0 < target_underestimation < 1.0:
        raise InputError("target_underestimation must be in (0, 1)")

    usable = spot > 0
    if not usable.any():
        raise InputError("no rows with positive spot price")
    n = int(usable.sum())
    ratio_short = np.sort(short[usable] / spot[usable])
    ratio_long = np.sort(long_[usable] / spot[usable])

    i_short = int(np.ceil((1.0 - target_underestimation) * n - _EPS)) - 1
    i_long = int(np.floor(target_underestimation * n + _EPS))
    k_short = ratio_short[min(max(i_short, 0), n - 1)]
    k_long = ratio_long[min(max(i_long, 0), n - 1)]
    return ImbalanceFactors(k_short=float(k_short), k_long=float(k_long))
