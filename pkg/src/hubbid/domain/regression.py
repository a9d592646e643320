"""Fitting cluster power models and memory ratios from usage history."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..errors import FitError
from .types import ALL_RESOURCES, MEMORY_PARTNER, MEMORY_RESOURCES


def fit_cluster_power_model(
    usage_history: Mapping[str, Sequence[float]],
    power_history: Sequence[float],
) -> tuple[float, dict[str, float]]:
    """Fit the affine usage-to-IT-power model of one cluster by OLS.

    ``usage_history`` maps resource name -> per-step usage series (a pandas
    DataFrame with resource columns works as well); ``power_history`` is the
    matching IT power draw in kW. Returns ``(rho_intercept, rho_coeff)`` with
    one coefficient per resource in ``usage_history``.

    Zero-variance columns (idle resources) are dropped before the fit and get
    coefficient 0. A rank-deficient design after that raises
    :class:`~hubbid.errors.FitError` naming the collinear columns.
    """
    columns = list(usage_history)
    unknown = [c for c in columns if c not in ALL_RESOURCES]
    if unknown:
        raise FitError(f"unknown resource columns: {unknown}")

    y = np.asarray(power_history, dtype=float)
    cols = {c: np.asarray(usage_history[c], dtype=float) for c in columns}
    lengths = {len(v) for v in cols.values()} | {len(y)}
    if len(lengths) != 1:
        raise FitError(f"usage and power series lengths differ: {sorted(lengths)}")
    n = len(y)

    stacked = np.column_stack([cols[c] for c in columns]) if columns else np.empty((n, 0))
    if n < 2 or len(np.unique(stacked, axis=0)) < 2:
        raise FitError("need at least 2 distinct usage rows")

    kept = [c for c in columns if np.ptp(cols[c]) > 0]

    # Greedy rank check against the intercept-augmented design: any kept
    # column already in the span of the previous ones is collinear.
    basis = np.ones((n, 1))
    collinear = []
    for c in kept:
        trial = np.column_stack([basis, cols[c]])
        if np.linalg.matrix_rank(trial) > np.linalg.matrix_rank(basis):
            basis = trial
        else:
            collinear.append(c)
    if collinear:
        raise FitError(f"collinear usage columns: {collinear}")

    design = np.column_stack([np.ones(n)] + [cols[c] for c in kept])
    theta, *_ = np.linalg.lstsq(design, y, rcond=None)

    coeff = {c: 0.0 for c in columns}
    for c, value in zip(kept, theta[1:]):
        coeff[c] = float(value)
    return float(theta[0]), coeff


def fit_memory_ratios(
    usage_history: Mapping[tuple[str, str], Sequence[float]],
) -> dict[tuple[str, str], float]:
    """Estimate per-cluster memory/compute usage ratios from history.

    ``usage_history`` maps (cluster_id, resource) -> per-step usage. For each
    memory resource present, gamma is the mean over steps of memory usage
    divided by the paired compute usage, skipping steps where the compute
    usage is zero. All-zero compute usage raises
    :class:`~hubbid.errors.FitError`.
    """
    ratios: dict[tuple[str, str], float] = {}
    for (cluster_id, res), series in usage_history.items():
        if res not in MEMORY_RESOURCES:
            continue
        partner = MEMORY_PARTNER[res]
        if (cluster_id, partner) not in usage_history:
            raise FitError(f"cluster {cluster_id}: {res} history lacks a {partner} column")
        mem = np.asarray(series, dtype=float)
        compute = np.asarray(usage_history[cluster_id, partner], dtype=float)
        active = compute > 0
        if not active.any():
            raise FitError(f"cluster {cluster_id}: {partner} usage is all zero")
        ratios[cluster_id, res] = float(np.mean(mem[active] / compute[active]))
    return ratios
